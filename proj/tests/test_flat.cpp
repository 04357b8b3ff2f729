#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "uplab/errors.hpp"
#include "uplab/flat.hpp"
#include "uplab/rng.hpp"

using namespace uplab;
using std::numbers::pi;

namespace {

Eigen::MatrixXd diag3(double a, double b, double c) { return Eigen::Vector3d(a, b, c).asDiagonal(); }

std::vector<MinkowskiNorm> bank3() {
  return {MinkowskiNorm::euclidean(3), MinkowskiNorm::weighted_euclidean(diag3(4, 1, 1)),
          MinkowskiNorm::lp(3, 4.0), MinkowskiNorm::lp(3, 3.0)};
}

// Plain transcriptions of the kernels, no log-space evaluation.
double h_direct(double p, double q, double l, double r) {
  return std::pow(l + std::pow(r, 2 - q), (2 * p - 2) / (2 - p)) * std::pow(r, -(q + 1)) *
         (2 * std::pow(r, 2 - q) * (p - q) / (p - 2) + q * l);
}
double g_direct(double p, double q, double l, double r) {
  return std::pow(l + std::pow(r, 2 - q), (3 * p - 4) / (2 - p)) / std::pow(r, 2 * q - 1) *
         (std::pow(r, 2 - q) * ((2 * p - 2) * (2 - q) / (p - 2) + 2 * (q - 1)) + 2 * (q - 1) * l);
}

double simpson(const std::function<double(double)>& f, double a, double b, int m) {
  const double h = (b - a) / (2 * m);
  double s = f(a) + f(b);
  for (int i = 1; i < 2 * m; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
  return s * h / 3;
}

double smoothstep(double t) { return t * t * t * (10 - 15 * t + 6 * t * t); }

}  // namespace

TEST_CASE("ExponentTriple admissibility") {
  CHECK_NOTHROW(ExponentTriple(3, 3, 1));
  auto failed = [](int n, double p, double q) {
    try {
      ExponentTriple(n, p, q);
    } catch (const AdmissibilityError& e) {
      return e.failed_inequality();
    }
    return std::string("none");
  };
  CHECK(failed(5, 3, 1) == "n < 2(p-q)/(p-2)");
  CHECK(failed(3, 3, 2.5) == "q < 2");
  CHECK(failed(3, 3, 0) == "0 < q");
  CHECK(failed(3, 2, 1) == "2 < p");
  CHECK(failed(2, 3, 1) == "2 < n");
  CHECK_FALSE(ExponentTriple(3, 3, 1).slow_decay());
  CHECK(ExponentTriple(3, 3, 1.49975).slow_decay());  // 2(p-q)/(p-2) = 3.0005
  CHECK(ExponentTriple(3, 3, 1).sharp_constant() == doctest::Approx(4.0 / 9.0));
  CHECK(ExponentTriple(3, 3, 1).scaling_exponent() == doctest::Approx(-1.0));
}

TEST_CASE("kernel examples") {
  const ExponentTriple t(3, 3, 1);
  CHECK(kernel_h(t, 1, 1) == doctest::Approx(5.0 / 16.0).epsilon(1e-15));
  CHECK(kernel_g(t, 1, 1) == doctest::Approx(1.0 / 8.0).epsilon(1e-15));
  CHECK_THROWS_AS(kernel_h(t, 0, 1), DomainError);
  CHECK_THROWS_AS(kernel_g(t, 1, -1), DomainError);

  for (auto [n, p, q] : {std::tuple{3, 3.0, 1.0}, {3, 2.5, 0.5}, {4, 2.4, 0.3}, {3, 2.2, 1.7}}) {
    const ExponentTriple tr(n, p, q);
    for (double l : {0.1, 1.0, 7.0})
      for (double r : {1e-3, 0.3, 1.0, 4.0, 100.0}) {
        CHECK(kernel_h(tr, l, r) == doctest::Approx(h_direct(p, q, l, r)).epsilon(1e-12));
        CHECK(kernel_g(tr, l, r) == doctest::Approx(g_direct(p, q, l, r)).epsilon(1e-12));
        CHECK(kernel_h(tr, l, r) > 0);
        if (q >= 1) CHECK(kernel_g(tr, l, r) > 0);
      }
    // For q < 1 the 2(q-1) lambda term makes g negative near the origin,
    // while R = omega_n int rho^n g stays positive.
    if (q < 1) {
      CHECK(kernel_g(tr, 1, 1e-3) < 0);
      CHECK(pqr(tr, 1, PqrSelector::R).value > 0);
    }
    // rho^n h has log-slope n - 2(p-q)/(p-2) - 1 at infinity; probe where
    // lambda / rho^{2-q} is 1e-8.
    const double r1 = std::pow(1e8, 1 / (2 - q)), r2 = 10 * r1;
    const double slope = (std::log(std::pow(r2, n) * kernel_h(tr, 1, r2)) -
                          std::log(std::pow(r1, n) * kernel_h(tr, 1, r1))) / std::log(r2 / r1);
    CHECK(slope == doctest::Approx(n - tr.critical_dimension() - 1).epsilon(1e-4));
    // Homogeneity of g under (lambda, rho) -> (s^{2-q} lambda, s rho).
    const double s = 2.0;
    const double e = (2 - q) * (3 * p - 4) / (2 - p) - (2 * q - 1) + (2 - q);
    CHECK(kernel_g(tr, std::pow(s, 2 - q) * 0.7, s * 1.3) ==
          doctest::Approx(std::pow(s, e) * kernel_g(tr, 0.7, 1.3)).epsilon(1e-13));
  }
}

TEST_CASE("pqr against closed forms for (3,3,1)") {
  // w = 1/(lambda + rho): P = 2 pi / lambda, R = Q = 4 pi / (3 lambda).
  const ExponentTriple t(3, 3, 1);
  for (double l : {0.1, 1.0, 10.0}) {
    CHECK(pqr(t, l, PqrSelector::P).value == doctest::Approx(2 * pi / l).epsilon(1e-9));
    CHECK(pqr(t, l, PqrSelector::R).value == doctest::Approx(4 * pi / (3 * l)).epsilon(1e-9));
    CHECK(pqr(t, l, PqrSelector::Q).value == doctest::Approx(4 * pi / (3 * l)).epsilon(1e-9));
  }
  CHECK(pqr(t, 1, PqrSelector::P).value / pqr(t, 2, PqrSelector::P).value ==
        doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(pqr(t, 0, PqrSelector::P), DomainError);
}

TEST_CASE("pqr relations and the layer-cake cross-check") {
  for (auto [n, p, q] : {std::tuple{3, 3.0, 1.0}, {3, 2.5, 0.5}, {4, 2.4, 0.3}}) {
    const ExponentTriple t(n, p, q);
    const auto norm = MinkowskiNorm::euclidean(n);
    for (double l : {0.5, 3.0}) {
      const auto P = pqr(t, l, PqrSelector::P), Q = pqr(t, l, PqrSelector::Q),
                 R = pqr(t, l, PqrSelector::R);
      CHECK(P.value == doctest::Approx(p * (2 - q) / ((n - q) * (p - 2)) * R.value).epsilon(1e-8));
      // Direct integrals of w_lambda: C = P, A = Q, B = R.
      const auto rep = interpolation_report(norm, t, interpolation_extremal(t, l));
      CHECK(rep.integrals[0] == doctest::Approx(Q.value).epsilon(1e-8));
      CHECK(rep.integrals[1] == doctest::Approx(R.value).epsilon(1e-8));
      CHECK(rep.integrals[2] == doctest::Approx(P.value).epsilon(1e-8));
    }
  }
}

TEST_CASE("check_pqr_identity") {
  const auto a = check_pqr_identity(ExponentTriple(3, 3, 1), {0.1, 1, 10});
  REQUIRE(a.size() == 3);
  for (const auto& r : a) {
    CHECK(std::abs(r.ratio - 4.0 / 9.0) <= 1e-7);
    CHECK(r.equality());
  }
  const auto b = check_pqr_identity(ExponentTriple(3, 2.5, 0.5), {1});
  REQUIRE(b.size() == 1);
  CHECK(std::abs(b[0].ratio - 1.0) <= 1e-7);
  CHECK(check_pqr_identity(ExponentTriple(3, 3, 1), {}).empty());
}

TEST_CASE("pqr identity holds on sampled admissible triples") {
  const CounterRng rng(41);
  int tried = 0;
  for (std::uint64_t i = 0; tried < 12; ++i) {
    const int n = 3 + static_cast<int>(rng.uniform(i, 0) * 2);
    const double p = 2.05 + 1.5 * rng.uniform(i, 1);
    const double q = 0.05 + 1.9 * rng.uniform(i, 2);
    if (!(n < 2 * (p - q) / (p - 2) - 0.2)) continue;
    ++tried;
    const ExponentTriple t(n, p, q);
    for (const auto& r : check_pqr_identity(t, {0.5, 1, 2})) {
      CAPTURE(n); CAPTURE(p); CAPTURE(q);
      CHECK(std::abs(r.ratio - t.sharp_constant()) <= 1e-6);
      CHECK(r.holds());
    }
  }
}

TEST_CASE("P satisfies its first-order ODE and power law") {
  for (const auto& t : {ExponentTriple(3, 3, 1), ExponentTriple(3, 2.5, 0.5)}) {
    for (double res : check_p_ode(t, {0.5, 1, 2})) CHECK(res <= 1e-5);
    CHECK(fit_p_power(t, {0.5, 1, 2}) == doctest::Approx(t.scaling_exponent()).epsilon(1e-4));
  }
  CHECK(check_p_ode(ExponentTriple(3, 2.5, 0.5), {2}).at(0) <= 1e-5);
  CHECK(check_p_ode(ExponentTriple(3, 3, 1), {}).empty());
  CHECK(fit_p_power(ExponentTriple(3, 2.5, 0.5), {0.5, 2}) ==
        doctest::Approx(2.5 / 1.5 - 5.0).epsilon(1e-4));
}

TEST_CASE("interpolation_report") {
  const ExponentTriple t(3, 3, 1);
  const auto e = MinkowskiNorm::euclidean(3);
  const auto ext = interpolation_report(e, t, interpolation_extremal(t, 1));
  CHECK(ext.ratio == doctest::Approx(4.0 / 9.0).epsilon(1e-8));
  CHECK(ext.equality());

  const auto g = gaussian_test(1.0);
  const auto ge = interpolation_report(e, t, g);
  const auto g4 = interpolation_report(MinkowskiNorm::lp(3, 4.0), t, g);
  MESSAGE("interpolation ratio for exp(-rho^2), (3,3,1): " << ge.ratio);
  CHECK(ge.slack > 1e-3);
  CHECK(ge.ratio == doctest::Approx(0.93717062).epsilon(1e-7));  // scipy cross-check
  CHECK(ge.ratio == g4.ratio);

  CHECK_THROWS_AS(interpolation_report(MinkowskiNorm::euclidean(2), t, g), DomainError);
  RadialProfile zero{[](double) { return 0.0; }, GaussianDecay{1}};
  CHECK_THROWS_AS(interpolation_report(e, t, TestFunction::radial(zero)), DomainError);
}

TEST_CASE("general Monte Carlo path matches the radial reduction") {
  // A radial bump handed over as a general function of x, with finite
  // difference gradients, against its radial control.
  const ExponentTriple t(3, 3, 1);
  QuadratureSpec spec;
  spec.mc_samples = 1 << 19;
  for (const auto& norm : {MinkowskiNorm::euclidean(3), MinkowskiNorm::lp(3, 4.0)}) {
    auto value = [&norm](const Vector& x) {
      const double r = norm.value(x);
      return r < 1 ? 1 - smoothstep(r) : 0.0;
    };
    const auto mc = interpolation_report(norm, t, TestFunction::general(value, {}, Box::cube(3, 1.0)), spec);
    const auto radial = interpolation_report(norm, t, smoothstep_bump(1.0), spec);
    for (int k = 0; k < 3; ++k) {
      CAPTURE(k);
      CHECK(std::abs(mc.integrals[k] - radial.integrals[k]) <= 3 * mc.integral_errors[k] + 1e-4 * radial.integrals[k]);
    }
    CHECK(mc.holds());
  }
}

TEST_CASE("gaussian_T closed form and ODE") {
  CHECK(gaussian_T(2, 0.5).value == doctest::Approx(pi).epsilon(1e-12));
  CHECK(gaussian_T(3, 0.5).value == doctest::Approx(std::pow(pi, 1.5)).epsilon(1e-12));
  for (int n : {3, 4})
    for (double l : {0.5, 1.0}) {
      const auto c = gaussian_T(n, l);
      CHECK(c.rel_diff <= 1e-9);
      // Gamma-function oracle for int t^{n+1} e^{-t^2} = Gamma(n/2 + 1)/2.
      const double gamma_form = 2 * std::pow(2 * l, -0.5 * n) * unit_ball_volume(n) *
                                0.5 * std::tgamma(0.5 * n + 1);
      CHECK(c.value == doctest::Approx(gamma_form).epsilon(1e-10));
      CHECK(gaussian_T_ode_residual(n, l) <= 1e-6);
    }
  CHECK_THROWS_AS(gaussian_T(3, 0), DomainError);
}

TEST_CASE("HPW equality family on every norm") {
  for (const auto& norm : bank3())
    for (double l : {0.5, 1.0, 2.0}) {
      const auto r = hpw_report(norm, 3, gaussian_test(l));
      CHECK(std::abs(r.ratio - 2.25) <= 1e-6);
      CHECK(r.equality());
    }
  for (double l : {0.5, 1.0, 2.0})
    for (int n : {2, 3, 5}) {
      const auto m = hpw_moment_identity(n, l);
      CHECK(std::abs(m.lhs - m.rhs) <= 1e-8 * m.rhs);
    }
}

TEST_CASE("HPW strict inequality off the Gaussian family") {
  // Derivative left to central differences.
  RadialProfile u{[](double r) { return (1 + r * r) * std::exp(-r * r); }, GaussianDecay{1}};
  const auto r = hpw_report(MinkowskiNorm::euclidean(3), 3, TestFunction::radial(u));
  MESSAGE("HPW ratio for (1+rho^2)exp(-rho^2), n=3: " << r.ratio);
  CHECK(r.slack > 1e-3);
  CHECK(r.ratio == doctest::Approx(2.36900826).epsilon(1e-7));  // scipy cross-check
}

TEST_CASE("HPW on the general path for a non-euclidean norm") {
  QuadratureSpec spec;
  spec.mc_samples = 1 << 19;
  const auto norm = MinkowskiNorm::lp(3, 4.0);
  auto value = [&](const Vector& x) { const double f = norm.value(x); return std::exp(-f * f); };
  auto gradient = [&](const Vector& x) -> Vector {
    const double f = norm.value(x);
    if (f == 0.0) return Vector::Zero(3);
    return -2 * f * std::exp(-f * f) * norm.gradient(x);
  };
  const auto r = hpw_report(norm, 3, TestFunction::general(value, gradient, Box::cube(3, 6.0)), spec);
  CHECK(std::abs(r.slack) <= 5 * r.ratio_error);
}

TEST_CASE("hardy_report") {
  const auto e = MinkowskiNorm::euclidean(3);
  RadialProfile u{[](double r) { return r * std::exp(-r * r); }, GaussianDecay{1}};
  const auto r3 = hardy_report(e, 3, TestFunction::radial(u));
  CHECK(r3.slack > 0);
  CHECK(r3.target == 0.25);

  RadialProfile v{[](double r) { return r * r * std::exp(-r * r); }, GaussianDecay{1}};
  const auto r4 = hardy_report(MinkowskiNorm::euclidean(4), 4, TestFunction::radial(v));
  CHECK(r4.ratio > 1.0);

  RadialProfile zero{[](double) { return 0.0; }, GaussianDecay{1}};
  CHECK_THROWS_AS(hardy_report(e, 3, TestFunction::radial(zero)), DomainError);
  CHECK_THROWS_AS(hardy_report(e, 3, TestFunction::radial(u), -1.0), DomainError);
  CHECK_THROWS_AS(hardy_report(MinkowskiNorm::euclidean(2), 2, TestFunction::radial(u)), DomainError);
}

TEST_CASE("Hardy sharpness sweep") {
  const int n = 3;
  const double r = 1, R = 2;
  std::vector<double> eps;
  for (int k = 2; k <= 8; ++k) eps.push_back(std::pow(10.0, -k));
  const auto sweep = hardy_sharpness_sweep(MinkowskiNorm::euclidean(n), n, r, R, eps);
  REQUIRE(sweep.rows.size() == eps.size());
  CHECK(sweep.non_increasing);

  // Exact structure: on [eps, r] both integrands are explicit, so
  // q(eps) = (g^2 ln(r/eps) + A) / (ln(r/eps) + 1/(n-2) + B) with A, B the
  // [r, R] contributions (divided by n omega_n), here by Simpson's rule.
  const double g = 0.5;
  auto psi = [&](double x) { return 1 - smoothstep((x - r) / (R - r)); };
  auto dpsi = [&](double x) { const double t = (x - r) / (R - r); return -30 * t * t * (t - 1) * (t - 1) / (R - r); };
  const double A = simpson([&](double x) {
    const double d = -g * std::pow(x, -g - 1) * psi(x) + std::pow(x, -g) * dpsi(x);
    return x * x * d * d;
  }, r, R, 20000);
  const double B = simpson([&](double x) { return std::pow(x, -2 * g) * psi(x) * psi(x); }, r, R, 20000);
  const double nw = n * unit_ball_volume(n);
  for (const auto& row : sweep.rows) {
    const double L = std::log(r / row.param);
    CHECK(row.ratio == doctest::Approx((g * g * L + A) / (L + 1.0 / (n - 2) + B)).epsilon(1e-9));
    CHECK(row.ratio >= 0.25);
    CHECK(row.integrals[2] == doctest::Approx(nw * L).epsilon(1e-10));
  }
  MESSAGE("Hardy limit " << sweep.limit << " (b = " << sweep.b << ", c = " << sweep.c
                         << "); plain 1/ln fit " << sweep.plain_fit_limit);
  CHECK(std::abs(sweep.limit - 0.25) <= 0.01);
  CHECK(sweep.c == doctest::Approx(1.0 / (n - 2) + B).epsilon(1e-4));

  CHECK_THROWS_AS(hardy_sharpness_sweep(MinkowskiNorm::euclidean(3), 3, r, R, {1.5}), DomainError);
}

TEST_CASE("double_hardy_report") {
  const auto bump = smoothstep_bump(1.0);
  const auto e = double_hardy_report(MinkowskiNorm::euclidean(3), 3, bump, 1.0, 2.0);
  CHECK(e.param == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(e.slack >= 0);
  const auto l4 = double_hardy_report(MinkowskiNorm::lp(3, 4.0), 3, bump, 1.0, 2.0);
  CHECK(l4.param < 1.0);
  CHECK(l4.slack >= 0);
  CHECK(l4.ratio > e.ratio);  // smaller remainder weight l

  RadialProfile zero{[](double r) { return 0.0 * r; }, CompactSupport{1.0}};
  CHECK_THROWS_AS(double_hardy_report(MinkowskiNorm::euclidean(3), 3, TestFunction::radial(zero), 1.0, 2.0),
                  DomainError);
  CHECK_THROWS_AS(double_hardy_report(MinkowskiNorm::euclidean(3), 3, bump, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(double_hardy_report(MinkowskiNorm::euclidean(3), 3, smoothstep_bump(1.5), 1.0, 2.0),
                  DomainError);
}

TEST_CASE("radial reports are translation invariant") {
  Vector x0(3);
  x0 << 1.0, -2.0, 0.5;
  const auto e = MinkowskiNorm::lp(3, 4.0);
  const ExponentTriple t(3, 3, 1);
  const auto a = interpolation_report(e, t, gaussian_test(0.7));
  const auto b = interpolation_report(e, t, gaussian_test(0.7, x0));
  CHECK(a.ratio == b.ratio);
  CHECK(a.integrals == b.integrals);
  CHECK(hpw_report(e, 3, gaussian_test(2.0)).ratio == hpw_report(e, 3, gaussian_test(2.0, x0)).ratio);
}
