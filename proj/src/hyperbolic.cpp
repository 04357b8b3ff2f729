#include "uplab/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <sstream>
#include <thread>

#include "uplab/errors.hpp"

namespace uplab {

namespace {

using std::numbers::pi;

double log_sinh(double rho) {
  if (rho < 20.0) return std::log(std::sinh(rho));
  return rho - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * rho));
}

// x coth x - 1 without cancellation near 0.
double x_coth_x_minus_1(double x) {
  if (x < 0.1) {
    const double x2 = x * x;
    return x2 * (1.0 / 3.0 + x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0 - x2 / 4725.0)));
  }
  return x / std::tanh(x) - 1.0;
}

double rel(const IntegralResult& r) { return r.value == 0.0 ? 0.0 : r.error / std::abs(r.value); }

void require_nonzero(const IntegralResult& r, const char* what) {
  if (r.value == 0.0 || !std::isfinite(r.value)) {
    std::ostringstream os;
    os << what << " vanishes; the quotient is 0/0 (zero test function?)";
    throw DomainError(os.str());
  }
}

InequalityReport report(std::string label, double param, double lhs, double rhs, double target,
                        const std::vector<IntegralResult>& parts, double rel_error) {
  InequalityReport r;
  r.label = std::move(label);
  r.param = param;
  r.lhs = lhs;
  r.rhs = rhs;
  r.ratio = lhs / rhs;
  r.target = target;
  r.slack = r.ratio - target;
  for (const auto& p : parts) {
    r.integrals.push_back(p.value);
    r.integral_errors.push_back(p.error);
  }
  r.ratio_error = std::abs(r.ratio) * rel_error;
  return r;
}

const std::function<double(double)>& checked_eval(const RadialHypFunction& u) {
  if (!u.u.eval) throw DomainError("radial function has no evaluator");
  return u.u.eval;
}

RadialProfile derivative_profile(const RadialHypFunction& u) {
  if (u.du.eval) return u.du;
  RadialProfile du = u.u;
  du.eval = [f = u.u.eval](double rho) { return fd_derivative(f, rho); };
  return du;
}

// int u^2 w(d) dV over H^n, w given pointwise; origin/decay classes from u^2 rho^-extra.
IntegralResult u2_integral(const RadialHypFunction& u, int n, double extra,
                           std::function<double(double)> weight, const QuadratureSpec& spec) {
  const auto& f = checked_eval(u);
  return hyperbolic_radial_volume_integral(
      derived_profile(u.u, [f, w = std::move(weight)](double rho) {
        const double v = f(rho);
        return v == 0.0 ? 0.0 : v * v * w(rho);
      }, 2.0, extra),
      n, spec);
}

IntegralResult grad_integral(const RadialHypFunction& u, int n, const QuadratureSpec& spec) {
  const RadialProfile du = derivative_profile(u);
  return hyperbolic_radial_volume_integral(
      derived_profile(du, [f = du.eval](double rho) { const double v = f(rho); return v * v; },
                      2.0, 0.0),
      n, spec);
}

void require_dim(int n, int min) {
  if (n < min) {
    std::ostringstream os;
    os << "dimension n = " << n << " is below the minimum " << min;
    throw DomainError(os.str());
  }
}

}  // namespace

double ct(double c, double rho) {
  if (c > 0.0) throw DomainError("curvature bound c must be <= 0");
  if (!(rho > 0.0)) throw DomainError("ct needs rho > 0");
  if (c == 0.0) return 1.0 / rho;
  const double k = std::sqrt(-c);
  return k / std::tanh(k * rho);
}

double D(double c, double rho) {
  if (c > 0.0) throw DomainError("curvature bound c must be <= 0");
  if (rho < 0.0) throw DomainError("D needs rho >= 0");
  if (c == 0.0 || rho == 0.0) return 0.0;
  return x_coth_x_minus_1(std::sqrt(-c) * rho);
}

double hyp_distance_from_radius(double r) {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("point is not inside the unit ball");
  return std::log1p(r) - std::log1p(-r);
}

double hyp_distance(const Vector& x) { return hyp_distance_from_radius(x.norm()); }

double conformal_factor(const Vector& x) {
  const double r = x.norm();
  if (!(r < 1.0)) throw DomainError("point is not inside the unit ball");
  return 2.0 / ((1.0 - r) * (1.0 + r));
}

RadialHypFunction hyperbolic_gaussian(double alpha, double beta) {
  if (!(alpha > 0.0) || beta < 0.0) throw DomainError("hyperbolic Gaussian needs alpha > 0, beta >= 0");
  auto u = [=](double d) { return std::exp(-alpha * d * d - beta * d); };
  RadialHypFunction f;
  f.u = {u, GaussianDecay{alpha}};
  f.du = {[=](double d) { return -(2.0 * alpha * d + beta) * u(d); }, GaussianDecay{alpha}};
  f.d2u = [=](double d) {
    const double s = 2.0 * alpha * d + beta;
    return (s * s - 2.0 * alpha) * u(d);
  };
  return f;
}

double radial_laplacian(const RadialHypFunction& u, int n, double rho) {
  if (!(rho > 0.0)) throw DomainError("radial Laplacian needs rho > 0");
  const RadialProfile du = derivative_profile(u);
  const double d2 = u.d2u ? u.d2u(rho) : fd_derivative(du.eval, rho);
  return d2 + (n - 1) / std::tanh(rho) * du.eval(rho);
}

double ball_radial_laplacian(const RadialHypFunction& u, int n, double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("ball radius must lie in (0, 1)");
  const double d = hyp_distance_from_radius(r);
  const RadialProfile du = derivative_profile(u);
  const double u1 = du.eval(d);
  const double u2 = u.d2u ? u.d2u(d) : fd_derivative(du.eval, d);
  const double p = 2.0 / ((1.0 - r) * (1.0 + r));
  const double dp_over_p = r * p;  // p' = r p^2
  // f(r) = u(d(r)) with d'(r) = p, d''(r) = r p^2.
  const double f_r = u1 * p;
  const double f_rr = u2 * p * p + u1 * r * p * p;
  return (f_rr + ((n - 1) / r + (n - 2) * dp_over_p) * f_r) / (p * p);
}

std::vector<ComparisonRow> laplace_comparison_check(int n, const std::vector<double>& cs,
                                                    const std::vector<double>& rho_grid) {
  require_dim(n, 2);
  RadialHypFunction dist;
  dist.u = {[](double d) { return d; }, AlgebraicDecay{0.0}};
  dist.du = {[](double) { return 1.0; }, AlgebraicDecay{0.0}};
  dist.d2u = [](double) { return 0.0; };
  std::vector<ComparisonRow> out;
  for (double c : cs) {
    if (c > 0.0) throw DomainError("curvature bound c must be <= 0");
    for (double rho : rho_grid) {
      const double r = std::tanh(0.5 * rho);
      ComparisonRow row;
      row.c = c;
      row.rho = hyp_distance_from_radius(r);
      row.laplacian = ball_radial_laplacian(dist, n, r);
      row.bound = (n - 1) * ct(c, row.rho);
      const double scale = std::abs(row.bound);
      row.holds = row.laplacian >= row.bound - 1e-12 * scale;
      row.equality = std::abs(row.laplacian - row.bound) <= 1e-12 * scale;
      out.push_back(row);
    }
  }
  return out;
}

VolumeRatioReport hyp_volume_ratio_check(int n, const std::vector<double>& rho_grid,
                                         const QuadratureSpec& spec) {
  require_dim(n, 2);
  VolumeRatioReport rep;
  const double omega = unit_ball_volume(n);
  for (double rho : rho_grid) {
    if (!(rho > 0.0)) throw DomainError("volume ratio grid must be positive");
    RadialProfile ind{[rho](double x) { return x < rho ? 1.0 : 0.0; }, CompactSupport{rho}};
    const auto v = hyperbolic_radial_volume_integral(ind, n, spec);
    VolumeRatioRow row{rho, v.value, v.value / std::pow(rho, n), v.error / std::pow(rho, n)};
    if (!rep.rows.empty()) {
      if (rho <= rep.rows.back().rho) throw DomainError("volume ratio grid must be increasing");
      if (row.ratio < rep.rows.back().ratio - 1e-10) rep.non_decreasing = false;
    }
    if (row.ratio < omega * (1.0 - 1e-12)) rep.above_flat = false;
    rep.rows.push_back(row);
  }
  return rep;
}

IntegralResult hyp_ball_volume_monte_carlo(int n, double rho, const QuadratureSpec& spec) {
  require_dim(n, 2);
  if (!(rho > 0.0)) throw DomainError("ball radius must be positive");
  const double r = std::tanh(0.5 * rho);
  return monte_carlo_integral(
      [r, n](const Vector& x) {
        const double s = x.norm();
        if (s >= r) return 0.0;
        return std::pow(2.0 / ((1.0 - s) * (1.0 + s)), n);
      },
      Box::cube(n, r), spec);
}

InequalityReport hpw_hyperbolic_report(const RadialHypFunction& u, int n, const QuadratureSpec& spec) {
  require_dim(n, 2);
  const auto A = grad_integral(u, n, spec);
  const auto B = u2_integral(u, n, -2.0, [](double d) { return d * d; }, spec);
  const auto C = u2_integral(u, n, 0.0, [](double) { return 1.0; }, spec);
  for (const auto* r : {&A, &B, &C}) require_nonzero(*r, "hyperbolic HPW integral");
  return report("hpw-hyperbolic", 0.0, A.value * B.value, C.value * C.value, 0.25 * n * n,
                {A, B, C}, rel(A) + rel(B) + 2.0 * rel(C));
}

InequalityReport modified_hpw_report(const RadialHypFunction& u, int n, const QuadratureSpec& spec) {
  require_dim(n, 2);
  const auto A = grad_integral(u, n, spec);
  const auto B = u2_integral(u, n, -2.0, [](double d) { return d * d; }, spec);
  const double k = (n - 1.0) / n;
  const auto C = u2_integral(u, n, 0.0, [k](double d) { return 1.0 + k * D(-1.0, d); }, spec);
  for (const auto* r : {&A, &B, &C}) require_nonzero(*r, "modified HPW integral");
  return report("hpw-modified", 0.0, A.value * B.value, C.value * C.value, 0.25 * n * n,
                {A, B, C}, rel(A) + rel(B) + 2.0 * rel(C));
}

InequalityReport modified_hpw_report(double alpha, int n, const QuadratureSpec& spec) {
  auto r = modified_hpw_report(hyperbolic_gaussian(alpha), n, spec);
  r.param = alpha;
  return r;
}

std::pair<InequalityReport, InequalityReport> hardy_hyperbolic_report(
    const RadialHypFunction& u, int n, const QuadratureSpec& spec) {
  require_dim(n, 3);
  const double g2 = 0.25 * (n - 2) * (n - 2);
  const auto A = grad_integral(u, n, spec);
  const auto I2 = u2_integral(u, n, 2.0, [](double d) { return 1.0 / (d * d); }, spec);
  const auto I3 = u2_integral(u, n, 0.0, [](double d) {
    return d == 0.0 ? 1.0 / 3.0 : D(-1.0, d) / (d * d);
  }, spec);
  const auto I4 = u2_integral(u, n, 0.0, [](double d) { return 1.0 / (pi * pi + d * d); }, spec);
  for (const auto* r : {&A, &I2}) require_nonzero(*r, "hyperbolic Hardy integral");

  const double k3 = 2.0 * (n - 1.0) / (n - 2.0);
  const double rhs1 = g2 * (I2.value + k3 * I3.value);
  const double rhs1_err = g2 * (I2.error + k3 * I3.error);
  const double k4 = 1.5 * (n - 1.0) * (n - 2.0);
  const double rhs2 = g2 * I2.value + k4 * I4.value;
  const double rhs2_err = g2 * I2.error + k4 * I4.error;
  return {report("hardy-hyperbolic", 0.0, A.value, rhs1, 1.0, {A, I2, I3}, rel(A) + rhs1_err / rhs1),
          report("hardy-hyperbolic-corollary", 0.0, A.value, rhs2, 1.0, {A, I2, I4},
                 rel(A) + rhs2_err / rhs2)};
}

double corollary_bound_margin(const std::vector<double>& rho_grid) {
  double m = 1e300;
  for (double rho : rho_grid) {
    if (!(rho > 0.0)) throw DomainError("corollary grid must be positive");
    m = std::min(m, x_coth_x_minus_1(rho) - 3.0 * rho * rho / (pi * pi + rho * rho));
  }
  return m;
}

std::pair<double, IntegralResult> ko_c_scaled(int k, double alpha, const QuadratureSpec& spec) {
  require_dim(k, 1);
  if (!(alpha > 0.0)) throw DomainError("C_k needs alpha > 0");
  const double m = k - 1.0;
  // max of -alpha rho^2 + m rho, so the scaled integrand stays O(1).
  const double shift = m * m / (4.0 * alpha);
  RadialProfile prof{[=](double rho) {
                       if (m == 0.0) return std::exp(-alpha * rho * rho);
                       if (rho == 0.0) return 0.0;
                       return std::exp(-alpha * rho * rho + m * log_sinh(rho) - shift);
                     },
                     GaussianDecay{alpha}};
  prof.scale = 2.0 * m / alpha;
  const auto r = radial_integral(prof, PowerWeight{0.0}, spec);
  return {shift, r.scaled(k * unit_ball_volume(k))};
}

double ko_c(int k, double alpha, const QuadratureSpec& spec) {
  const auto [shift, r] = ko_c_scaled(k, alpha, spec);
  return std::exp(shift) * r.value;
}

double ko_phi(int n, double alpha, const QuadratureSpec& spec) {
  require_dim(n, 3);
  const auto [s_lo, c_lo] = ko_c_scaled(n - 2, alpha, spec);
  const auto [s_hi, c_hi] = ko_c_scaled(n, alpha, spec);
  const double ratio = std::exp(s_lo - s_hi) * c_lo.value / c_hi.value;
  return (n - 1.0) / (n - 2.0) * (n - 1.0 + 2.0 * pi * ratio) - alpha;
}

KoScan ko_alpha_scan(int n, double lo, double hi, int nodes, const QuadratureSpec& spec) {
  require_dim(n, 3);
  KoScan scan;
  if (!(hi > lo) || nodes <= 0) return scan;
  if (lo < 0.0) throw DomainError("alpha range must be positive");
  scan.alpha.resize(nodes);
  scan.phi.resize(nodes);
  for (int i = 0; i < nodes; ++i) scan.alpha[i] = lo + (hi - lo) * (i + 1) / nodes;

  const int workers = static_cast<int>(std::max(1u, std::min(8u, std::thread::hardware_concurrency())));
  std::vector<std::future<void>> jobs;
  for (int w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (int i = w; i < nodes; i += workers) scan.phi[i] = ko_phi(n, scan.alpha[i], spec);
    }));
  for (auto& j : jobs) j.get();

  for (int i = 1; i < nodes; ++i) {
    const double fa = scan.phi[i - 1], fb = scan.phi[i];
    if (fa == 0.0 || (fa < 0.0) != (fb < 0.0)) {
      SignChange sc{scan.alpha[i - 1], scan.alpha[i], scan.alpha[i - 1]};
      double a = sc.lo, b = sc.hi, va = fa;
      for (int it = 0; it < 100 && b - a > 1e-13 * b; ++it) {
        const double mid = 0.5 * (a + b);
        const double vm = ko_phi(n, mid, spec);
        if ((vm < 0.0) == (va < 0.0)) { a = mid; va = vm; } else { b = mid; }
      }
      sc.root = 0.5 * (a + b);
      scan.sign_changes.push_back(sc);
    }
  }
  return scan;
}

ChpwBounds hpw_constant_bounds(int n, const std::vector<double>& alphas,
                               const std::vector<double>& betas, const QuadratureSpec& spec) {
  require_dim(n, 2);
  if (alphas.empty() || betas.empty()) throw DomainError("trial family is empty");
  ChpwBounds b;
  b.lower = 0.25 * n * n;
  b.upper = 1e300;
  for (double beta : betas)
    for (double alpha : alphas) {
      auto r = hpw_hyperbolic_report(hyperbolic_gaussian(alpha, beta), n, spec);
      r.label = "chpw-trial";
      r.param = alpha;
      if (r.ratio < b.upper) {
        b.upper = r.ratio;
        b.argmin_alpha = alpha;
        b.argmin_beta = beta;
      }
      b.trials.push_back(std::move(r));
      b.trial_beta.push_back(beta);
    }
  return b;
}

ChpwBounds hpw_constant_bounds(int n, const QuadratureSpec& spec) {
  std::vector<double> alphas;
  for (int i = 0; i < 25; ++i) alphas.push_back(0.02 * std::pow(2500.0, i / 24.0));
  return hpw_constant_bounds(n, alphas, {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}, spec);
}

}  // namespace uplab
