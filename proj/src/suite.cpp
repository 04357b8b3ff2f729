#include "uplab/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "uplab/hyperbolic.hpp"
#include "uplab/report.hpp"

namespace uplab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Builder {
 public:
  Builder(std::string suite, const RunConfig& config) : suite_(std::move(suite)), config_(config) {}

  // Runs `compute`, which fills in the rows; a throw becomes one failed row.
  void add(const std::string& check, CheckMode mode, double tolerance, double param,
           const std::function<std::vector<InequalityReport>()>& compute) {
    if (config_.tolerance && mode != CheckMode::Strict && mode != CheckMode::Exact)
      tolerance = *config_.tolerance;
    try {
      for (auto& row : compute()) push(check, mode, tolerance, std::move(row), "");
    } catch (const std::exception& e) {
      InequalityReport row;
      row.label = check;
      row.param = param;
      for (double* v : {&row.lhs, &row.rhs, &row.ratio, &row.target, &row.slack, &row.ratio_error})
        *v = kNaN;
      push(check, mode, tolerance, std::move(row), e.what());
    }
  }
  void add_one(const std::string& check, CheckMode mode, double tolerance, double param,
               const std::function<InequalityReport()>& compute) {
    add(check, mode, tolerance, param, [&] { return std::vector<InequalityReport>{compute()}; });
  }

  SuiteResult& result() { return result_; }

 private:
  void push(const std::string& check, CheckMode mode, double tolerance, InequalityReport row,
            std::string error) {
    CheckResult c;
    c.suite = suite_;
    c.check = check;
    c.row = std::move(row);
    c.mode = mode;
    c.tolerance = tolerance;
    c.error = std::move(error);
    judge(c);
    result_.checks.push_back(std::move(c));
  }

  std::string suite_;
  const RunConfig& config_;
  SuiteResult result_;
};

// A scalar measurement against a target, as a report row.
InequalityReport scalar_row(const std::string& label, double param, double value, double target,
                            double error = 0.0) {
  InequalityReport r;
  r.label = label;
  r.param = param;
  r.lhs = value;
  r.rhs = target;
  r.ratio = value;
  r.target = target;
  r.slack = value - target;
  r.ratio_error = error;
  return r;
}

std::vector<int> dimensions(const RunConfig& c) {
  std::vector<int> out;
  for (double d : c.grids.dimensions) out.push_back(static_cast<int>(d));
  return out;
}

// ---- suites ------------------------------------------------------------------

void identities(Builder& b, const RunConfig& c) {
  const auto& q = c.quadrature;
  const ExponentTriple t = *c.triple;
  for (double l : c.grids.lambda) {
    b.add("pqr-identity", CheckMode::Abs, 1e-6, l,
          [&] { return check_pqr_identity(t, {l}, q); });
    b.add_one("p-ode-residual", CheckMode::Abs, 1e-5, l,
              [&] { return scalar_row("p-ode-residual", l, check_p_ode(t, {l}, q).at(0), 0.0); });
  }
  if (c.grids.lambda.size() >= 2)
    b.add_one("p-power-fit", CheckMode::Abs, 1e-4, t.n(), [&] {
      return scalar_row("p-power-fit", t.n(), fit_p_power(t, c.grids.lambda, q), t.scaling_exponent());
    });
}

void flat_hpw(Builder& b, const RunConfig& c) {
  const auto& q = c.quadrature;
  const MinkowskiNorm norm = build_norm(c.norm);
  const int n = norm.dimension();
  for (double l : c.grids.lambda) {
    b.add_one("hpw-gaussian", CheckMode::Rel, 1e-6, l, [&] {
      auto r = hpw_report(norm, n, gaussian_test(l), q);
      r.param = l;
      return r;
    });
    b.add_one("hpw-moment", CheckMode::Abs, 1e-8, l, [&] { return hpw_moment_identity(n, l, q); });
    b.add_one("t-closed-form", CheckMode::Rel, 1e-9, l, [&] {
      const auto t = gaussian_T(n, l, q);
      return scalar_row("t-closed-form", l, t.value, t.closed_form, t.error);
    });
    b.add_one("t-ode-residual", CheckMode::Abs, 1e-6, l, [&] {
      return scalar_row("t-ode-residual", l, gaussian_T_ode_residual(n, l, q), 0.0);
    });
    if (c.triple && c.triple->n() == n)
      b.add_one("interpolation-extremal", CheckMode::Rel, 1e-6, l, [&] {
        auto r = interpolation_report(norm, *c.triple, interpolation_extremal(*c.triple, l), q);
        r.param = l;
        return r;
      });
  }
}

void flat_hardy(Builder& b, const RunConfig& c) {
  const auto& q = c.quadrature;
  const MinkowskiNorm norm = build_norm(c.norm);
  const int n = norm.dimension();
  const double r = c.params.hardy_r, R = c.params.hardy_R;
  HardySweep sweep;
  bool ok = false;
  b.add("hardy-quotient", CheckMode::Min, 1e-9, n, [&] {
    sweep = hardy_sharpness_sweep(norm, n, r, R, c.grids.epsilon, q);
    ok = true;
    return sweep.rows;
  });
  if (ok) {
    // Largest step up of the quotient as epsilon decreases.
    std::vector<const InequalityReport*> order;
    for (const auto& row : sweep.rows) order.push_back(&row);
    std::sort(order.begin(), order.end(), [](auto* a, auto* z) { return a->param > z->param; });
    double rise = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < order.size(); ++i) rise = std::max(rise, order[i]->ratio - order[i - 1]->ratio);
    b.add_one("hardy-non-increasing", CheckMode::Min, 1e-9, n,
              [&] { return scalar_row("hardy-non-increasing", n, -rise, 0.0); });
    b.add_one("hardy-limit", CheckMode::Abs, 1e-2, n, [&] {
      return scalar_row("hardy-limit", n, sweep.limit, (n - 2.0) * (n - 2.0) / 4.0);
    });
    PlotSeries s{"hardy_quotient", {"ln_inv_eps", "quotient"}, {}};
    for (const auto* row : order) s.rows.push_back({std::log(1.0 / row->param), row->ratio});
    b.result().series.push_back(std::move(s));
  }
  b.add_one("double-hardy", CheckMode::Min, 1e-9, r,
            [&] { return double_hardy_report(norm, n, smoothstep_bump(r), r, R, q); });
}

RadialHypFunction d_gaussian() {
  RadialHypFunction f;
  f.u = {[](double d) { return d * std::exp(-d * d); }, GaussianDecay{1}};
  f.du = {[](double d) { return (1 - 2 * d * d) * std::exp(-d * d); }, GaussianDecay{1}};
  f.d2u = [](double d) { return (4 * d * d * d - 6 * d) * std::exp(-d * d); };
  return f;
}

void hyperbolic(Builder& b, const RunConfig& c) {
  const auto& q = c.quadrature;
  for (int n : dimensions(c)) {
    const double dn = n;
    b.add_one("laplace-comparison-model", CheckMode::Abs, 1e-12, dn, [&] {
      double worst = 0.0;
      for (const auto& row : laplace_comparison_check(n, {-1.0}, c.grids.rho))
        worst = std::max(worst, std::abs(row.laplacian / row.bound - 1.0));
      return scalar_row("laplace-comparison-model", dn, worst, 0.0);
    });
    b.add_one("laplace-comparison-flat", CheckMode::Min, 1e-12, dn, [&] {
      double least = std::numeric_limits<double>::infinity();
      for (const auto& row : laplace_comparison_check(n, {0.0}, c.grids.rho))
        least = std::min(least, row.laplacian / row.bound - 1.0);
      return scalar_row("laplace-comparison-flat", dn, least, 0.0);
    });
    VolumeRatioReport vol;
    bool have_vol = false;
    b.add_one("volume-ratio-non-decreasing", CheckMode::Min, 1e-10, dn, [&] {
      auto grid = c.grids.rho;
      std::sort(grid.begin(), grid.end());
      vol = hyp_volume_ratio_check(n, grid, q);
      have_vol = true;
      double step = std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i < vol.rows.size(); ++i)
        step = std::min(step, vol.rows[i].ratio - vol.rows[i - 1].ratio);
      if (vol.rows.size() < 2) step = 0.0;
      return scalar_row("volume-ratio-non-decreasing", dn, step, 0.0);
    });
    if (have_vol) {
      b.add_one("volume-ratio-above-flat", CheckMode::Min, 1e-12, dn, [&] {
        double least = std::numeric_limits<double>::infinity();
        for (const auto& row : vol.rows) least = std::min(least, row.ratio / unit_ball_volume(n) - 1.0);
        return scalar_row("volume-ratio-above-flat", dn, least, 0.0);
      });
      PlotSeries s{"volume_ratio_n" + std::to_string(n), {"rho", "ratio"}, {}};
      for (const auto& row : vol.rows) s.rows.push_back({row.rho, row.ratio});
      b.result().series.push_back(std::move(s));
    }
    b.add_one("volume-ratio-small-ball", CheckMode::Rel, 1e-4, dn, [&] {
      const auto v = hyp_volume_ratio_check(n, {0.01}, q);
      return scalar_row("volume-ratio-small-ball", 0.01, v.rows[0].ratio, unit_ball_volume(n));
    });
    for (double a : c.grids.alpha)
      b.add_one("modified-hpw-n" + std::to_string(n), CheckMode::Rel, 1e-6, a,
                [&] { return modified_hpw_report(a, n, q); });
    b.add("hardy-hyperbolic-n" + std::to_string(n), CheckMode::Min, 1e-9, dn, [&] {
      auto [first, second] = hardy_hyperbolic_report(d_gaussian(), n, q);
      first.param = second.param = dn;
      return std::vector<InequalityReport>{first, second};
    });
  }
  // param: right end of the 10^4-point grid.
  b.add_one("corollary-pointwise-bound", CheckMode::Min, 1e-12, 50.0, [&] {
    std::vector<double> grid;
    for (int i = 1; i <= 10000; ++i) grid.push_back(50.0 * i / 10000);
    return scalar_row("corollary-pointwise-bound", 50.0, corollary_bound_margin(grid), 0.0);
  });
}

void ko_refute(Builder& b, const RunConfig& c) {
  const auto& q = c.quadrature;
  for (int n : dimensions(c))
    b.add_one("hpw-strict", CheckMode::Strict, 100.0, n, [&] {
      auto r = hpw_hyperbolic_report(hyperbolic_gaussian(1.0), n, q);
      r.param = n;
      return r;
    });
  const auto& p = c.params;
  KoScan scan;
  bool ok = false;
  b.add_one("ko-sign-changes", CheckMode::Exact, 0.0, p.ko_n, [&] {
    scan = ko_alpha_scan(p.ko_n, p.ko_alpha_min, p.ko_alpha_max, p.ko_nodes, q);
    ok = true;
    return scalar_row("ko-sign-changes", p.ko_n, static_cast<double>(scan.sign_changes.size()), 0.0);
  });
  if (ok) {
    PlotSeries s{"ko_phi_n" + std::to_string(p.ko_n), {"alpha", "phi"}, {}};
    for (std::size_t i = 0; i < scan.alpha.size(); ++i) s.rows.push_back({scan.alpha[i], scan.phi[i]});
    b.result().series.push_back(std::move(s));
  }
}

void chpw_bounds(Builder& b, const RunConfig& c) {
  const auto& q = c.quadrature;
  PlotSeries s{"chpw_bounds", {"n", "lower", "upper", "argmin_alpha", "argmin_beta"}, {}};
  for (int n : dimensions(c))
    b.add_one("chpw-upper-above-lower", CheckMode::Min, 1e-12, n, [&] {
      ChpwBounds bounds;
      if (c.grids.alpha.empty())
        bounds = hpw_constant_bounds(n, q);
      else
        bounds = hpw_constant_bounds(n, c.grids.alpha,
                                     c.grids.beta.empty() ? std::vector<double>{0.0} : c.grids.beta, q);
      s.rows.push_back({double(n), bounds.lower, bounds.upper, bounds.argmin_alpha, bounds.argmin_beta});
      return scalar_row("chpw-upper-above-lower", n, bounds.upper, bounds.lower);
    });
  if (!s.rows.empty()) b.result().series.push_back(std::move(s));
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string mode_name(CheckMode m) {
  switch (m) {
    case CheckMode::Abs: return "abs";
    case CheckMode::Rel: return "rel";
    case CheckMode::Min: return "min";
    case CheckMode::Strict: return "strict";
    case CheckMode::Exact: return "exact";
  }
  return "?";
}

bool SuiteResult::pass() const {
  if (checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

void judge(CheckResult& c) {
  const auto& r = c.row;
  if (!c.error.empty() || !std::isfinite(r.slack) || !std::isfinite(r.ratio) ||
      !std::isfinite(r.target) || !std::isfinite(r.ratio_error)) {
    c.pass = false;
    return;
  }
  switch (c.mode) {
    case CheckMode::Abs: c.pass = std::abs(r.slack) <= c.tolerance; break;
    case CheckMode::Rel: c.pass = std::abs(r.slack) <= c.tolerance * std::abs(r.target); break;
    case CheckMode::Min: c.pass = r.slack >= -c.tolerance; break;
    case CheckMode::Strict: c.pass = r.slack > c.tolerance * r.ratio_error; break;
    case CheckMode::Exact: c.pass = r.slack == 0.0; break;
  }
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : render_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return hex64(h);
}

SuiteResult run_suite(const RunConfig& config, SuiteName which) {
  if (which == SuiteName::All) throw DomainError("run_suite needs a concrete suite");
  const auto start = std::chrono::steady_clock::now();
  Builder b(suite_name(which), config);
  switch (which) {
    case SuiteName::Identities: identities(b, config); break;
    case SuiteName::FlatHpw: flat_hpw(b, config); break;
    case SuiteName::FlatHardy: flat_hardy(b, config); break;
    case SuiteName::Hyperbolic: hyperbolic(b, config); break;
    case SuiteName::KoRefute: ko_refute(b, config); break;
    case SuiteName::ChpwBounds: chpw_bounds(b, config); break;
    case SuiteName::All: break;
  }
  SuiteResult r = std::move(b.result());
  r.name = suite_name(which);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.config_hash = config_hash(config);
  r.seed = config.quadrature.mc_seed;
  return r;
}

std::vector<SuiteResult> run_suites(const RunConfig& config) {
  std::vector<SuiteResult> out;
  if (config.suite == SuiteName::All)
    for (SuiteName s : concrete_suites()) out.push_back(run_suite(config, s));
  else
    out.push_back(run_suite(config, config.suite));
  return out;
}

std::string suite_csv(const SuiteResult& r) {
  std::string out = "check,param,lhs,rhs,ratio,target,slack,err,mode,tolerance,pass\n";
  for (const auto& c : r.checks) {
    out += c.check;
    for (double v : {c.row.param, c.row.lhs, c.row.rhs, c.row.ratio, c.row.target, c.row.slack,
                     c.row.ratio_error})
      out += "," + format_number(v);
    out += "," + mode_name(c.mode) + "," + format_number(c.tolerance) + "," + (c.pass ? "true" : "false") + "\n";
  }
  return out;
}

std::string suite_json(const SuiteResult& r) {
  using nlohmann::ordered_json;
  auto num = [](double v) -> ordered_json {
    if (std::isfinite(v)) return v;
    return format_number(v);
  };
  ordered_json j;
  j["suite"] = r.name;
  j["pass"] = r.pass();
  j["wall_seconds"] = r.wall_seconds;
  j["config_hash"] = r.config_hash;
  j["seed"] = r.seed;
  ordered_json rows = ordered_json::array();
  for (const auto& c : r.checks) {
    ordered_json row;
    row["check"] = c.check;
    row["param"] = num(c.row.param);
    row["lhs"] = num(c.row.lhs);
    row["rhs"] = num(c.row.rhs);
    row["ratio"] = num(c.row.ratio);
    row["target"] = num(c.row.target);
    row["slack"] = num(c.row.slack);
    row["err"] = num(c.row.ratio_error);
    row["mode"] = mode_name(c.mode);
    row["tolerance"] = num(c.tolerance);
    row["pass"] = c.pass;
    if (!c.error.empty()) row["error"] = c.error;
    rows.push_back(std::move(row));
  }
  j["checks"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string summary_text(const std::vector<SuiteResult>& results) {
  std::string out;
  char line[256];
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "suite %s: %s (%zu checks, %.2f s, config %s, seed %llu)\n",
                  r.name.c_str(), r.pass() ? "PASS" : "FAIL", r.checks.size(), r.wall_seconds,
                  r.config_hash.c_str(), static_cast<unsigned long long>(r.seed));
    out += line;
    for (const auto& c : r.checks) {
      std::snprintf(line, sizeof line, "  %-4s %-30s param=%-12.6g slack=%-14.6e tol=%.3e (%s)",
                    c.pass ? "ok" : "FAIL", c.check.c_str(), c.row.param, c.row.slack, c.tolerance,
                    mode_name(c.mode).c_str());
      out += line;
      if (!c.error.empty()) out += "  error: " + c.error;
      out += "\n";
    }
  }
  return out;
}

void write_suite_outputs(const std::vector<SuiteResult>& results, const std::string& dir) {
  for (const auto& r : results) {
    write_file(dir + "/" + r.name + ".csv", suite_csv(r));
    write_file(dir + "/" + r.name + ".json", suite_json(r));
  }
  write_file(dir + "/summary.txt", summary_text(results));
}

std::vector<std::string> emit_plot_data(const SuiteResult& result, const std::string& dir,
                                        std::ostream& warn) {
  std::vector<std::string> paths;
  for (const auto& s : result.series) {
    if (s.rows.empty()) continue;
    std::string body;
    for (std::size_t i = 0; i < s.columns.size(); ++i) body += (i ? "," : "") + s.columns[i];
    body += "\n";
    for (const auto& row : s.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) body += (i ? "," : "") + format_number(row[i]);
      body += "\n";
    }
    const std::string path = dir + "/" + s.name + ".csv";
    write_file(path, body);
    paths.push_back(path);
  }
  if (paths.empty()) warn << "warning: suite '" << result.name << "' produced no plot data\n";
  return paths;
}

}  // namespace uplab
