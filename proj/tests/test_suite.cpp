#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "doctest.h"
#include "uplab/suite.hpp"

using namespace uplab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("uplab_test_suite_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig example(const std::string& name) {
  return load_config(std::string(UPLAB_SOURCE_DIR "/configs/") + name + ".toml");
}

int cli(const std::string& args) {
  const std::string cmd = std::string(UPLAB_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("judge") {
  CheckResult c;
  c.row.target = 2;
  c.row.ratio = 2.1;
  c.row.slack = 0.1;
  c.row.ratio_error = 1e-4;
  c.tolerance = 0.1;
  c.mode = CheckMode::Abs;
  judge(c);
  CHECK(c.pass);
  c.mode = CheckMode::Rel;
  judge(c);
  CHECK(c.pass);  // 0.1 <= 0.1 * 2
  c.tolerance = 0.01;
  judge(c);
  CHECK_FALSE(c.pass);
  c.mode = CheckMode::Min;
  c.row.slack = -0.005;
  judge(c);
  CHECK(c.pass);
  c.mode = CheckMode::Strict;
  c.tolerance = 100;
  c.row.slack = 0.011;
  judge(c);
  CHECK(c.pass);
  c.row.slack = 0.009;
  judge(c);
  CHECK_FALSE(c.pass);
  c.mode = CheckMode::Exact;
  c.row.slack = 0;
  judge(c);
  CHECK(c.pass);
  c.row.slack = 1;
  judge(c);
  CHECK_FALSE(c.pass);
  // A non-finite value fails whatever the mode.
  c.mode = CheckMode::Min;
  c.row.slack = std::numeric_limits<double>::infinity();
  judge(c);
  CHECK_FALSE(c.pass);
  c.row.slack = 0;
  c.row.ratio = std::numeric_limits<double>::quiet_NaN();
  judge(c);
  CHECK_FALSE(c.pass);
  c.row.ratio = 1;
  c.error = "boom";
  judge(c);
  CHECK_FALSE(c.pass);
  CHECK_FALSE(SuiteResult{}.pass());
}

TEST_CASE("identities on (3,3,1)") {
  const auto r = run_suite(example("identities"), SuiteName::Identities);
  CHECK(r.pass());
  CHECK(r.seed == 24301);
  CHECK(r.config_hash.size() == 16);
  int pqr = 0;
  for (const auto& c : r.checks)
    if (c.check == "pqr-identity") {
      ++pqr;
      CHECK(std::abs(c.row.ratio - 4.0 / 9.0) <= 1e-6);
    }
  CHECK(pqr == 5);
  const auto rows = csv_rows(suite_csv(r));
  REQUIRE(rows.size() == r.checks.size() + 1);
  CHECK(rows[0] == std::vector<std::string>{"check", "param", "lhs", "rhs", "ratio", "target",
                                            "slack", "err", "mode", "tolerance", "pass"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].size() == 11);
    for (const auto& cell : rows[i]) CHECK(cell.find("nan") == std::string::npos);
  }
}

TEST_CASE("identical config and seed give byte-identical CSV") {
  for (const char* name : {"identities", "flat-hardy", "ko-refute"}) {
    const RunConfig c = example(name);
    const auto a = run_suites(c), b = run_suites(c);
    REQUIRE(a.size() == 1);
    CHECK(suite_csv(a[0]) == suite_csv(b[0]));
  }
  // Monte Carlo enters through custom norms.
  RunConfig c = example("flat-hpw");
  c.norm = {"custom", 3, 2.0, {}, "l2-l4-blend"};
  c.grids.lambda = {1};
  c.quadrature.mc_samples = 1 << 14;
  const auto a = run_suite(c, SuiteName::FlatHpw), b = run_suite(c, SuiteName::FlatHpw);
  CHECK(suite_csv(a) == suite_csv(b));
}

TEST_CASE("JSON mirrors the CSV rows") {
  const auto r = run_suite(example("ko-refute"), SuiteName::KoRefute);
  const auto j = nlohmann::json::parse(suite_json(r));
  CHECK(j["suite"] == "ko-refute");
  CHECK(j["pass"] == r.pass());
  CHECK(j["seed"] == 24301);
  CHECK(j["config_hash"] == r.config_hash);
  const auto rows = csv_rows(suite_csv(r));
  REQUIRE(j["checks"].size() == rows.size() - 1);
  for (std::size_t i = 0; i < j["checks"].size(); ++i) {
    const auto& row = j["checks"][i];
    for (std::size_t k = 0; k < rows[0].size(); ++k) CHECK(row.contains(rows[0][k]));
    CHECK(row["check"] == rows[i + 1][0]);
    CHECK(row["slack"].get<double>() == std::strtod(rows[i + 1][6].c_str(), nullptr));
  }
}

TEST_CASE("computation errors are recorded per check") {
  RunConfig c = example("identities");
  c.grids.lambda = {-1, 1};
  const auto r = run_suite(c, SuiteName::Identities);
  CHECK_FALSE(r.pass());
  int failed = 0, passed = 0;
  for (const auto& ch : r.checks) {
    if (ch.pass) ++passed;
    if (!ch.pass) {
      ++failed;
      CHECK_FALSE(ch.error.empty());
      CHECK(std::isnan(ch.row.slack));
    }
  }
  CHECK(failed >= 2);
  CHECK(passed == 2);  // both lambda = 1 checks still ran
  CHECK(summary_text({r}).find("error:") != std::string::npos);
}

TEST_CASE("tolerance override") {
  RunConfig c = example("ko-refute");
  c.tolerance = 1e-300;
  const auto r = run_suite(c, SuiteName::KoRefute);
  for (const auto& ch : r.checks) {
    if (ch.mode == CheckMode::Strict) CHECK(ch.tolerance == 100.0);
    if (ch.mode == CheckMode::Exact) CHECK(ch.tolerance == 0.0);
  }
  CHECK(r.pass());
  c = example("identities");
  c.tolerance = 1e-300;
  const auto s = run_suite(c, SuiteName::Identities);
  for (const auto& ch : s.checks) CHECK(ch.tolerance == 1e-300);
  CHECK_FALSE(s.pass());
  CHECK(summary_text({s}).find("tol=1.000e-300") != std::string::npos);
}

TEST_CASE("ko-refute passes iff no sign change is found") {
  const auto r = run_suite(example("ko-refute"), SuiteName::KoRefute);
  CHECK(r.pass());
  bool seen = false;
  for (const auto& ch : r.checks)
    if (ch.check == "ko-sign-changes") {
      seen = true;
      CHECK(ch.row.ratio == 0.0);
    }
  CHECK(seen);
  REQUIRE(r.series.size() == 1);
  CHECK(r.series[0].rows.size() == 4096);
  for (const auto& row : r.series[0].rows) CHECK(row[1] > 0);  // single-signed trace
}

TEST_CASE("plot data") {
  const fs::path dir = scratch("plots");
  std::ostringstream warn;
  const auto hardy = run_suite(example("flat-hardy"), SuiteName::FlatHardy);
  const auto paths = emit_plot_data(hardy, dir.string(), warn);
  REQUIRE(paths.size() == 1);
  CHECK(warn.str().empty());
  const auto rows = csv_rows(slurp(paths[0]));
  CHECK(rows[0] == std::vector<std::string>{"ln_inv_eps", "quotient"});
  REQUIRE(rows.size() == 8);
  for (std::size_t i = 2; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][0]) > std::stod(rows[i - 1][0]));
    CHECK(std::stod(rows[i][1]) < std::stod(rows[i - 1][1]));  // decreasing series
  }

  const auto hyp = run_suite(example("hyperbolic"), SuiteName::Hyperbolic);
  CHECK(emit_plot_data(hyp, dir.string(), warn).size() == 3);
  const auto vol = csv_rows(slurp(dir / "volume_ratio_n3.csv"));
  CHECK(vol[0] == std::vector<std::string>{"rho", "ratio"});

  const auto chpw = run_suite(example("chpw-bounds"), SuiteName::ChpwBounds);
  CHECK(emit_plot_data(chpw, dir.string(), warn).size() == 1);
  const auto table = csv_rows(slurp(dir / "chpw_bounds.csv"));
  CHECK(table[0] == std::vector<std::string>{"n", "lower", "upper", "argmin_alpha", "argmin_beta"});
  REQUIRE(table.size() == 3);
  CHECK(std::stod(table[1][1]) == 2.25);
  CHECK(std::stod(table[1][2]) >= 2.25);

  const fs::path empty_dir = scratch("empty");
  SuiteResult empty;
  empty.name = "identities";
  CHECK(emit_plot_data(empty, empty_dir.string(), warn).empty());
  CHECK_FALSE(fs::exists(empty_dir));
  CHECK(warn.str().find("warning") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("write_suite_outputs") {
  const fs::path dir = scratch("outputs");
  const auto r = run_suites(example("identities"));
  write_suite_outputs(r, dir.string());
  CHECK(fs::exists(dir / "identities.csv"));
  CHECK(fs::exists(dir / "identities.json"));
  const std::string summary = slurp(dir / "summary.txt");
  CHECK(summary.find("suite identities: PASS") != std::string::npos);
  CHECK(summary.find("slack=") != std::string::npos);
  CHECK(summary.find("tol=") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("exit-code contract") {
  const fs::path dir = scratch("cli");
  const std::string cfg = UPLAB_SOURCE_DIR "/configs/identities.toml";
  CHECK(cli("--config " + cfg + " --out " + (dir / "a").string()) == kExitPass);
  CHECK(cli("--config " + cfg + " --out " + (dir / "b").string()) == kExitPass);
  CHECK(slurp(dir / "a" / "identities.csv") == slurp(dir / "b" / "identities.csv"));
  CHECK(cli("--config " + cfg + " --out " + (dir / "c").string() + " --seed 99") == kExitPass);
  CHECK(slurp(dir / "c" / "identities.csv") == slurp(dir / "a" / "identities.csv"));
  CHECK(slurp(dir / "c" / "identities.json").find("\"seed\": 99") != std::string::npos);

  CHECK(cli("--config " + cfg + " --out " + (dir / "d").string() + " --tolerance 1e-300") ==
        kExitCheckFailed);

  fs::create_directories(dir);
  {
    std::ofstream bad(dir / "bad.toml");
    bad << "suite = \"identities\"\n[triple]\nn = 5\np = 3\nq = 1\n[grids]\nlambda = [1]\n";
  }
  CHECK(cli("--config " + (dir / "bad.toml").string() + " --out " + (dir / "e").string()) == kExitConfig);
  CHECK(cli("--config " + cfg + " --suite hyperbolic --out " + (dir / "f").string()) == kExitConfig);
  CHECK(cli("--config " + cfg + " --suite nope") == kExitConfig);
  CHECK(cli("--config " + cfg + " --tolerance -1") == kExitConfig);
  CHECK(cli("--nonsense") == kExitConfig);
  CHECK(cli("--config " + (dir / "missing.toml").string()) == kExitIo);
  // Output directory blocked by a regular file.
  { std::ofstream(dir / "blocker") << "x"; }
  CHECK(cli("--config " + cfg + " --out " + (dir / "blocker" / "sub").string()) == kExitIo);
  fs::remove_all(dir);
}
