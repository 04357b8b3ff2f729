#include "uplab/flat.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "uplab/errors.hpp"

namespace uplab {

namespace {

constexpr double kBoundaryMargin = 1e-3;

RadialProfile default_derivative(const RadialProfile& u) {
  RadialProfile du = u;
  du.eval = [f = u.eval](double rho) { return fd_derivative(f, rho); };
  if (const auto* a = std::get_if<AlgebraicDecay>(&u.decay)) du.decay = AlgebraicDecay{a->sigma + 1.0};
  if (const auto* s = std::get_if<PowerSingularOrigin>(&u.origin))
    du.origin = PowerSingularOrigin{s->tau + 1.0};
  return du;
}

const RadialProfile& derivative_of(const RadialTest& rt, RadialProfile& storage) {
  if (rt.du.eval) return rt.du;
  storage = default_derivative(rt.u);
  return storage;
}

double smoothstep(double t) { return t * t * t * (t * (6.0 * t - 15.0) + 10.0); }
double smoothstep_prime(double t) { return 30.0 * t * t * (t - 1.0) * (t - 1.0); }

void require_dimension(const MinkowskiNorm& norm, int n) {
  if (norm.dimension() != n) {
    std::ostringstream os;
    os << "norm dimension " << norm.dimension() << " does not match n = " << n;
    throw DomainError(os.str());
  }
}

Vector basepoint_of(const TestFunction& u, int n) {
  if (u.basepoint.size() == 0) return Vector::Zero(n);
  if (u.basepoint.size() != n) throw DomainError("basepoint dimension mismatch");
  return u.basepoint;
}

// Samples seen by integrands on the general path.
struct Sample {
  double dist;  // F(x - x0)
  double u;
  double dual;  // F*(Du(x))
};

IntegralResult general_integral(const MinkowskiNorm& norm, const GeneralTest& g,
                                const Vector& x0, const QuadratureSpec& spec,
                                const std::function<double(const Sample&)>& integrand) {
  const int n = norm.dimension();
  if (g.support.dimension() != n) throw DomainError("support box dimension mismatch");
  const double c = bh_density(norm, spec);
  const double h = 1e-5 * (g.support.upper - g.support.lower).norm();
  auto gradient = [&](const Vector& x) -> Vector {
    if (g.gradient) return g.gradient(x);
    Vector d(n);
    Vector xp = x, xm = x;
    for (int i = 0; i < n; ++i) {
      xp[i] = x[i] + h;
      xm[i] = x[i] - h;
      d[i] = (g.value(xp) - g.value(xm)) / (2.0 * h);
      xp[i] = xm[i] = x[i];
    }
    return d;
  };
  return monte_carlo_integral(
      [&](const Vector& x) {
        const double u = g.value(x);
        const Vector du = gradient(x);
        if (u == 0.0 && du.isZero(0.0)) return 0.0;
        return c * integrand({norm.value(x - x0), u, dual_norm_value(norm, Covector{du})});
      },
      g.support, spec);
}

InequalityReport make_report(std::string label, double param, double lhs, double rhs,
                             double target, std::vector<IntegralResult> parts,
                             double rel_error) {
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

double rel(const IntegralResult& r) { return r.value == 0.0 ? 0.0 : r.error / std::abs(r.value); }

void require_nonzero(const IntegralResult& r, const char* what) {
  if (r.value == 0.0 || !std::isfinite(r.value)) {
    std::ostringstream os;
    os << what << " vanishes; the quotient is 0/0 (zero test function?)";
    throw DomainError(os.str());
  }
}

// Three flat integrals of a test function, either radially or by Monte Carlo.
// Each term is |u|^pw_u |u'|^pw_du F^-k.
struct Term {
  double pw_u, pw_du, k;
};

std::vector<IntegralResult> flat_terms(const MinkowskiNorm& norm, int n, const TestFunction& u,
                                       const std::vector<Term>& terms, const QuadratureSpec& spec) {
  require_dimension(norm, n);
  const Vector x0 = basepoint_of(u, n);
  std::vector<IntegralResult> out;
  if (const auto* rt = std::get_if<RadialTest>(&u.kind)) {
    if (!rt->u.eval) throw DomainError("radial test function has no evaluator");
    RadialProfile storage;
    const RadialProfile& du = derivative_of(*rt, storage);
    for (const Term& t : terms) {
      RadialProfile prof;
      if (t.pw_du > 0.0) {
        prof = derived_profile(du, [f = du.eval, t](double rho) {
          return std::pow(std::abs(f(rho)), t.pw_du) * std::pow(rho, -t.k);
        }, t.pw_du, t.k);
      } else {
        prof = derived_profile(rt->u, [f = rt->u.eval, t](double rho) {
          const double v = std::abs(f(rho));
          if (v == 0.0) return 0.0;
          return std::pow(v, t.pw_u) * std::pow(rho, -t.k);
        }, t.pw_u, t.k);
      }
      out.push_back(flat_radial_volume_integral(prof, n, spec));
    }
  } else {
    const auto& g = std::get<GeneralTest>(u.kind);
    for (const Term& t : terms)
      out.push_back(general_integral(norm, g, x0, spec, [t](const Sample& s) {
        if (t.pw_du > 0.0) return std::pow(s.dual, t.pw_du) * std::pow(s.dist, -t.k);
        const double v = std::abs(s.u);
        if (v == 0.0) return 0.0;
        return std::pow(v, t.pw_u) * std::pow(s.dist, -t.k);
      }));
  }
  return out;
}

QuadratureSpec for_triple(const ExponentTriple& t, QuadratureSpec spec) {
  if (t.slow_decay()) spec.max_subdivisions *= 2;
  return spec;
}

}  // namespace

ExponentTriple::ExponentTriple(int n, double p, double q) : n_(n), p_(p), q_(q) {
  auto fail = [&](const char* inequality) {
    std::ostringstream os;
    os << "inadmissible exponents (n, p, q) = (" << n << ", " << p << ", " << q
       << "): violates " << inequality;
    throw AdmissibilityError(inequality, os.str());
  };
  if (!std::isfinite(p) || !std::isfinite(q)) fail("finite p, q");
  if (!(q > 0.0)) fail("0 < q");
  if (!(q < 2.0)) fail("q < 2");
  if (!(p > 2.0)) fail("2 < p");
  if (!(n > 2)) fail("2 < n");
  if (!(n < critical_dimension())) fail("n < 2(p-q)/(p-2)");
  slow_decay_ = q < kBoundaryMargin || 2.0 - q < kBoundaryMargin || p - 2.0 < kBoundaryMargin ||
                critical_dimension() - n < kBoundaryMargin;
}

double ExponentTriple::sharp_constant() const { return (n_ - q_) * (n_ - q_) / (p_ * p_); }

double ExponentTriple::scaling_exponent() const {
  return (n_ - q_) / (2.0 - q_) - p_ / (p_ - 2.0);
}

double kernel_h(const ExponentTriple& t, double lambda, double rho) {
  if (!(lambda > 0.0) || !(rho > 0.0)) throw DomainError("kernel_h needs lambda, rho > 0");
  const double p = t.p(), q = t.q();
  const double s = std::pow(rho, 2.0 - q);
  const double log_mag =
      (2.0 * p - 2.0) / (2.0 - p) * std::log(lambda + s) - (q + 1.0) * std::log(rho);
  return std::exp(log_mag) * (2.0 * s * (p - q) / (p - 2.0) + q * lambda);
}

double kernel_g(const ExponentTriple& t, double lambda, double rho) {
  if (!(lambda > 0.0) || !(rho > 0.0)) throw DomainError("kernel_g needs lambda, rho > 0");
  const double p = t.p(), q = t.q();
  const double s = std::pow(rho, 2.0 - q);
  const double log_mag =
      (3.0 * p - 4.0) / (2.0 - p) * std::log(lambda + s) - (2.0 * q - 1.0) * std::log(rho);
  const double bracket =
      s * ((2.0 * p - 2.0) * (2.0 - q) / (p - 2.0) + 2.0 * (q - 1.0)) + 2.0 * (q - 1.0) * lambda;
  return std::exp(log_mag) * bracket;
}

IntegralResult pqr(const ExponentTriple& t, double lambda, PqrSelector which,
                   const QuadratureSpec& spec) {
  if (!(lambda > 0.0)) throw DomainError("pqr needs lambda > 0");
  const double p = t.p(), q = t.q();
  // rho^n h and rho^n g both decay like rho^{n - 2(p-q)/(p-2) - 1}.
  const double sigma = (2.0 - q) * (2.0 * p - 2.0) / (p - 2.0) + 2.0 * q - 1.0;
  RadialProfile prof;
  prof.decay = AlgebraicDecay{sigma};
  prof.scale = std::pow(lambda, 1.0 / (2.0 - q));
  if (which == PqrSelector::P) {
    prof.eval = [&t, lambda](double rho) { return kernel_h(t, lambda, rho); };
    prof.origin = PowerSingularOrigin{q + 1.0};
  } else {
    prof.eval = [&t, lambda](double rho) { return kernel_g(t, lambda, rho); };
    if (2.0 * q - 1.0 > 0.0) prof.origin = PowerSingularOrigin{2.0 * q - 1.0};
  }
  IntegralResult r = radial_integral(prof, PowerWeight{static_cast<double>(t.n())},
                                     for_triple(t, spec))
                         .scaled(unit_ball_volume(t.n()));
  if (which == PqrSelector::Q) r = r.scaled((2.0 - q) * (2.0 - q) / ((p - 2.0) * (p - 2.0)));
  return r;
}

bool InequalityReport::equality() const { return std::abs(slack) <= 10.0 * ratio_error; }
bool InequalityReport::holds() const { return slack >= -10.0 * ratio_error; }

TestFunction TestFunction::radial(RadialProfile u, RadialProfile du, Vector basepoint) {
  return {RadialTest{std::move(u), std::move(du)}, std::move(basepoint)};
}

TestFunction TestFunction::general(std::function<double(const Vector&)> value,
                                   std::function<Vector(const Vector&)> gradient, Box support,
                                   Vector basepoint) {
  if (!value) throw DomainError("general test function has no evaluator");
  return {GeneralTest{std::move(value), std::move(gradient), std::move(support)},
          std::move(basepoint)};
}

std::vector<InequalityReport> check_pqr_identity(const ExponentTriple& t,
                                                 const std::vector<double>& lambdas,
                                                 const QuadratureSpec& spec) {
  std::vector<InequalityReport> out;
  for (double lambda : lambdas) {
    const auto P = pqr(t, lambda, PqrSelector::P, spec);
    const auto Q = pqr(t, lambda, PqrSelector::Q, spec);
    const auto R = pqr(t, lambda, PqrSelector::R, spec);
    out.push_back(make_report("pqr-identity", lambda, Q.value * R.value, P.value * P.value,
                              t.sharp_constant(), {P, Q, R}, rel(Q) + rel(R) + 2.0 * rel(P)));
  }
  return out;
}

std::vector<double> check_p_ode(const ExponentTriple& t, const std::vector<double>& lambdas,
                                const QuadratureSpec& spec) {
  // Finite differences amplify quadrature noise by 1/h, so P is evaluated
  // well below the residual threshold.
  QuadratureSpec tight = spec;
  tight.rel_tol = std::min(spec.rel_tol, 1e-13);
  tight.max_subdivisions = std::max(spec.max_subdivisions, 200);
  const double k = (-t.n() + t.critical_dimension()) / (2.0 - t.q());
  std::vector<double> out;
  for (double lambda : lambdas) {
    auto P = [&](double l) { return pqr(t, l, PqrSelector::P, tight).value; };
    const double p0 = P(lambda);
    out.push_back(std::abs(k * p0 + lambda * fd_derivative(P, lambda)) / p0);
  }
  return out;
}

double fit_p_power(const ExponentTriple& t, const std::vector<double>& lambdas,
                   const QuadratureSpec& spec) {
  if (lambdas.size() < 2) throw DomainError("power fit needs at least two lambdas");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double lambda : lambdas) {
    const double x = std::log(lambda);
    const double y = std::log(pqr(t, lambda, PqrSelector::P, spec).value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(lambdas.size());
  const double den = m * sxx - sx * sx;
  if (den == 0.0) throw DomainError("power fit needs distinct lambdas");
  return (m * sxy - sx * sy) / den;
}

TestFunction interpolation_extremal(const ExponentTriple& t, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("extremal needs lambda > 0");
  const double p = t.p(), q = t.q();
  const double sigma = (2.0 - q) / (p - 2.0);
  RadialProfile w{[=](double rho) { return std::pow(lambda + std::pow(rho, 2.0 - q), 1.0 / (2.0 - p)); },
                  AlgebraicDecay{sigma}};
  w.scale = std::pow(lambda, 1.0 / (2.0 - q));
  RadialProfile dw{[=](double rho) {
                     return (2.0 - q) / (2.0 - p) *
                            std::pow(lambda + std::pow(rho, 2.0 - q), 1.0 / (2.0 - p) - 1.0) *
                            std::pow(rho, 1.0 - q);
                   },
                   AlgebraicDecay{sigma + 1.0}};
  dw.scale = w.scale;
  if (q > 1.0) dw.origin = PowerSingularOrigin{q - 1.0};
  return TestFunction::radial(std::move(w), std::move(dw));
}

InequalityReport interpolation_report(const MinkowskiNorm& norm, const ExponentTriple& t,
                                      const TestFunction& u, const QuadratureSpec& spec) {
  const double p = t.p(), q = t.q();
  const auto parts = flat_terms(norm, t.n(), u,
                                {{0, 2, 0}, {2 * p - 2, 0, 2 * q - 2}, {p, 0, q}},
                                for_triple(t, spec));
  for (const auto& r : parts) require_nonzero(r, "interpolation integral");
  const auto &A = parts[0], &B = parts[1], &C = parts[2];
  return make_report("interpolation", 0.0, A.value * B.value, C.value * C.value,
                     t.sharp_constant(), parts, rel(A) + rel(B) + 2.0 * rel(C));
}

GaussianTCheck gaussian_T(int n, double lambda, const QuadratureSpec& spec) {
  if (!(lambda > 0.0)) throw DomainError("gaussian_T needs lambda > 0");
  const double w = unit_ball_volume(n);
  const auto direct = radial_integral(
      {[lambda](double r) { return std::exp(-2.0 * lambda * r * r); }, GaussianDecay{2.0 * lambda}},
      PowerWeight{n + 1.0}, spec);
  const auto unit =
      radial_integral({[](double r) { return std::exp(-r * r); }, GaussianDecay{1.0}},
                      PowerWeight{n + 1.0}, spec);
  GaussianTCheck c;
  c.value = 4.0 * lambda * w * direct.value;
  c.closed_form = 2.0 * std::pow(2.0 * lambda, -0.5 * n) * w * unit.value;
  c.rel_diff = std::abs(c.value - c.closed_form) / std::abs(c.value);
  c.error = 4.0 * lambda * w * direct.error;
  return c;
}

double gaussian_T_ode_residual(int n, double lambda, const QuadratureSpec& spec) {
  QuadratureSpec tight = spec;
  tight.rel_tol = std::min(spec.rel_tol, 1e-13);
  tight.max_subdivisions = std::max(spec.max_subdivisions, 200);
  auto T = [&](double l) { return gaussian_T(n, l, tight).value; };
  const double t0 = T(lambda);
  return std::abs(-lambda * fd_derivative(T, lambda) - 0.5 * n * t0) / t0;
}

TestFunction gaussian_test(double lambda, Vector basepoint) {
  if (!(lambda > 0.0)) throw DomainError("gaussian test function needs lambda > 0");
  RadialProfile u{[lambda](double r) { return std::exp(-lambda * r * r); }, GaussianDecay{lambda}};
  RadialProfile du{[lambda](double r) { return -2.0 * lambda * r * std::exp(-lambda * r * r); },
                   GaussianDecay{lambda}};
  return TestFunction::radial(std::move(u), std::move(du), std::move(basepoint));
}

InequalityReport hpw_report(const MinkowskiNorm& norm, int n, const TestFunction& u,
                            const QuadratureSpec& spec) {
  const auto parts = flat_terms(norm, n, u, {{0, 2, 0}, {2, 0, -2}, {2, 0, 0}}, spec);
  for (const auto& r : parts) require_nonzero(r, "HPW integral");
  const auto &A = parts[0], &B = parts[1], &C = parts[2];
  return make_report("hpw", 0.0, A.value * B.value, C.value * C.value, 0.25 * n * n, parts,
                     rel(A) + rel(B) + 2.0 * rel(C));
}

InequalityReport hpw_moment_identity(int n, double lambda, const QuadratureSpec& spec) {
  if (!(lambda > 0.0)) throw DomainError("moment identity needs lambda > 0");
  const RadialProfile g{[lambda](double r) { return std::exp(-2.0 * lambda * r * r); },
                        GaussianDecay{2.0 * lambda}};
  RadialProfile g2 = g;
  g2.eval = [lambda](double r) { return r * r * std::exp(-2.0 * lambda * r * r); };
  const auto second = flat_radial_volume_integral(g2, n, spec);
  const auto mass = flat_radial_volume_integral(g, n, spec);
  return make_report("hpw-moment", lambda, 2.0 * lambda * second.value, 0.5 * n * mass.value, 1.0,
                     {second, mass}, rel(second) + rel(mass));
}

InequalityReport hardy_report(const MinkowskiNorm& norm, int n, const TestFunction& u, double c,
                              const QuadratureSpec& spec) {
  if (c != 0.0) throw DomainError("flat space has curvature bound c = 0; use the hyperbolic lab");
  if (n < 3) throw DomainError("Hardy inequality needs n >= 3");
  const auto parts = flat_terms(norm, n, u, {{0, 2, 0}, {2, 0, 2}}, spec);
  for (const auto& r : parts) require_nonzero(r, "Hardy integral");
  const double gamma = 0.5 * (n - 2);
  return make_report("hardy", 0.0, parts[0].value, parts[1].value, gamma * gamma, parts,
                     rel(parts[0]) + rel(parts[1]));
}

double smooth_cutoff(double rho, double r, double R) {
  if (rho <= r) return 1.0;
  if (rho >= R) return 0.0;
  return 1.0 - smoothstep((rho - r) / (R - r));
}

double smooth_cutoff_derivative(double rho, double r, double R) {
  if (rho <= r || rho >= R) return 0.0;
  return -smoothstep_prime((rho - r) / (R - r)) / (R - r);
}

HardySweep hardy_sharpness_sweep(const MinkowskiNorm& norm, int n, double r, double R,
                                 const std::vector<double>& eps, const QuadratureSpec& spec) {
  require_dimension(norm, n);
  if (n < 3) throw DomainError("Hardy sweep needs n >= 3");
  if (!(r > 0.0 && r < R)) throw DomainError("Hardy sweep needs 0 < r < R");
  const double gamma = 0.5 * (n - 2);
  HardySweep sweep;
  for (double e : eps) {
    if (!(e > 0.0 && e < r)) {
      std::ostringstream os;
      os << "Hardy sweep needs 0 < eps < r; got eps = " << e << ", r = " << r;
      throw DomainError(os.str());
    }
    auto u = [=](double rho) { return std::pow(std::max(e, rho), -gamma) * smooth_cutoff(rho, r, R); };
    RadialProfile grad2{[=](double rho) {
                          if (rho < e) return 0.0;
                          const double d = -gamma * std::pow(rho, -gamma - 1.0) * smooth_cutoff(rho, r, R) +
                                           std::pow(rho, -gamma) * smooth_cutoff_derivative(rho, r, R);
                          return d * d;
                        },
                        CompactSupport{R}};
    grad2.inner = e;
    grad2.breakpoints = {r};
    RadialProfile weighted{[=](double rho) { const double v = u(rho); return v * v / (rho * rho); },
                           CompactSupport{R}, PowerSingularOrigin{2.0}};
    weighted.breakpoints = {e, r};
    RadialProfile core{[=](double rho) { return rho < r ? std::pow(rho, -2.0 * gamma - 2.0) : 0.0; },
                       CompactSupport{r}};
    core.inner = e;
    const auto i1 = flat_radial_volume_integral(grad2, n, spec);
    const auto i2 = flat_radial_volume_integral(weighted, n, spec);
    const auto i2core = flat_radial_volume_integral(core, n, spec);
    sweep.rows.push_back(make_report("hardy-sweep", e, i1.value, i2.value, gamma * gamma,
                                     {i1, i2, i2core}, rel(i1) + rel(i2)));
  }

  // Monotonicity as eps decreases.
  std::vector<const InequalityReport*> order;
  for (const auto& row : sweep.rows) order.push_back(&row);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->param > b->param; });
  sweep.non_increasing = true;
  for (std::size_t i = 1; i < order.size(); ++i)
    if (order[i]->ratio > order[i - 1]->ratio + 10.0 * (order[i]->ratio_error + order[i - 1]->ratio_error))
      sweep.non_increasing = false;

  // q = L + b x with x = 1/(ln(1/eps) + c); L and b by least squares for
  // each c, c by minimizing the residual (variable projection).
  struct Fit { double L, b, rss; };
  auto fit = [&](double c) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(sweep.rows.size());
    for (const auto& row : sweep.rows) {
      const double x = 1.0 / (std::log(1.0 / row.param) + c);
      sx += x; sy += row.ratio; sxx += x * x; sxy += x * row.ratio;
    }
    const double b = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double L = (sy - b * sx) / m;
    double rss = 0;
    for (const auto& row : sweep.rows) {
      const double res = row.ratio - L - b / (std::log(1.0 / row.param) + c);
      rss += res * res;
    }
    return Fit{L, b, rss};
  };
  if (sweep.rows.size() >= 2) {
    const Fit plain = fit(0.0);
    sweep.plain_fit_limit = plain.L;
    sweep.limit = plain.L;
    sweep.b = plain.b;
  }
  if (sweep.rows.size() >= 3) {
    double lmin = 1e300;
    for (const auto& row : sweep.rows) lmin = std::min(lmin, std::log(1.0 / row.param));
    // Coarse scan of c over (-lmin, 1e3], then golden section on the best cell.
    const double lo_c = -lmin + 1e-3 * std::max(1.0, lmin);
    const int grid = 400;
    auto c_at = [&](int i) { return lo_c + (std::pow(10.0, 3.0 * i / grid) - 1.0) * (1e3 - lo_c) / 999.0; };
    int best = 0;
    for (int i = 1; i <= grid; ++i)
      if (fit(c_at(i)).rss < fit(c_at(best)).rss) best = i;
    double a = c_at(std::max(0, best - 1)), b = c_at(std::min(grid, best + 1));
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200 && b - a > 1e-12 * (1.0 + std::abs(a)); ++it) {
      const double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      if (fit(x1).rss < fit(x2).rss) b = x2; else a = x1;
    }
    const double c = 0.5 * (a + b);
    const Fit f = fit(c);
    sweep.limit = f.L;
    sweep.b = f.b;
    sweep.c = c;
  }
  return sweep;
}

InequalityReport double_hardy_report(const MinkowskiNorm& norm, int n, const TestFunction& u,
                                     double support_radius, double R, const QuadratureSpec& spec) {
  if (n < 3) throw DomainError("double Hardy inequality needs n >= 3");
  if (!(support_radius > 0.0 && R > support_radius))
    throw DomainError("double Hardy inequality needs 0 < support radius < R");
  require_dimension(norm, n);
  if (const auto* rt = std::get_if<RadialTest>(&u.kind)) {
    const auto* cs = std::get_if<CompactSupport>(&rt->u.decay);
    if (!cs || cs->radius > support_radius)
      throw DomainError("test function must be supported in the ball of the stated radius");
  } else {
    const auto& g = std::get<GeneralTest>(u.kind);
    const Vector x0 = basepoint_of(u, n);
    // F is convex, so its maximum over the box is at a vertex.
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      Vector v(n);
      for (int i = 0; i < n; ++i) v[i] = (mask >> i & 1) ? g.support.upper[i] : g.support.lower[i];
      if (norm.value(v - x0) > support_radius)
        throw DomainError("support box reaches beyond the stated support radius");
    }
  }
  const double gamma = 0.5 * (n - 2);
  const double l = uniformity_constant(norm, spec).value;

  auto parts = flat_terms(norm, n, u, {{0, 2, 0}, {2, 0, 2}}, spec);
  for (const auto& r : parts) require_nonzero(r, "double Hardy integral");
  // Remainder term: u^2 / (F^2 ln^2(eR/F)).
  IntegralResult rem;
  if (const auto* rt = std::get_if<RadialTest>(&u.kind)) {
    RadialProfile prof = derived_profile(rt->u, [f = rt->u.eval, R](double rho) {
      const double v = f(rho);
      const double lg = std::log(std::exp(1.0) * R / rho);
      return v * v / (rho * rho * lg * lg);
    }, 2.0, 2.0);
    rem = flat_radial_volume_integral(prof, n, spec);
  } else {
    rem = general_integral(norm, std::get<GeneralTest>(u.kind), basepoint_of(u, n), spec,
                           [R](const Sample& s) {
                             if (s.u == 0.0) return 0.0;
                             const double lg = std::log(std::exp(1.0) * R / s.dist);
                             return s.u * s.u / (s.dist * s.dist * lg * lg);
                           });
  }
  const double rhs = gamma * gamma * parts[1].value + 0.25 * l * rem.value;
  parts.push_back(rem);
  const double rhs_rel = (gamma * gamma * parts[1].error + 0.25 * l * rem.error) / rhs;
  auto rep = make_report("double-hardy", l, parts[0].value, rhs, 1.0, parts, rel(parts[0]) + rhs_rel);
  return rep;
}

TestFunction smoothstep_bump(double radius, Vector basepoint) {
  if (!(radius > 0.0)) throw DomainError("bump radius must be positive");
  RadialProfile u{[radius](double r) { return r < radius ? 1.0 - smoothstep(r / radius) : 0.0; },
                  CompactSupport{radius}};
  RadialProfile du{[radius](double r) { return r < radius ? -smoothstep_prime(r / radius) / radius : 0.0; },
                   CompactSupport{radius}};
  return TestFunction::radial(std::move(u), std::move(du), std::move(basepoint));
}

}  // namespace uplab
