// Command-line front end: runs a verification suite from a config file and
// writes CSV/JSON reports, summary.txt and plot series into the output dir.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "uplab/config.hpp"
#include "uplab/suite.hpp"

int main(int argc, char** argv) {
  using namespace uplab;

  CLI::App app{"Run uncertainty-principle verification suites"};
  std::string config_path, suite, out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  app.add_option("--config", config_path, "Config file (grammar in docs/config.md)")->required();
  app.add_option("--suite", suite, "Override the suite: identities, flat-hpw, flat-hardy, "
                                   "hyperbolic, ko-refute, chpw-bounds, all");
  app.add_option("--out", out, "Override the output directory");
  app.add_option("--seed", seed, "Override the Monte Carlo seed");
  app.add_option("--tolerance", tolerance, "Override every accuracy tolerance");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  RunConfig config;
  try {
    config = load_config(config_path);
    if (!suite.empty()) config.suite = parse_suite_name(suite);
    if (!out.empty()) config.output_dir = out;
    if (seed) config.quadrature.mc_seed = *seed;
    if (tolerance) config.tolerance = *tolerance;
    if (auto issues = validate_config(config); !issues.empty()) throw ConfigError(std::move(issues));
  } catch (const DomainError& e) {
    std::cerr << "config error:\n" << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitIo;
  }

  const auto results = run_suites(config);
  try {
    write_suite_outputs(results, config.output_dir);
    for (const auto& r : results) emit_plot_data(r, config.output_dir, std::cerr);
  } catch (const Error& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kExitIo;
  }
  std::cout << summary_text(results);
  for (const auto& r : results)
    if (!r.pass()) return kExitCheckFailed;
  return kExitPass;
}
