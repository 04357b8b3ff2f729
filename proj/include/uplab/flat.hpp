#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "uplab/norm.hpp"
#include "uplab/quadrature.hpp"

namespace uplab {

/// Exponents (n, p, q) with 0 < q < 2 < p and 2 < n < 2(p-q)/(p-2).
/// Construction throws AdmissibilityError naming the first failed inequality.
class ExponentTriple {
 public:
  ExponentTriple(int n, double p, double q);

  int n() const { return n_; }
  double p() const { return p_; }
  double q() const { return q_; }

  /// 2(p-q)/(p-2), the upper bound on n.
  double critical_dimension() const { return 2.0 * (p_ - q_) / (p_ - 2.0); }
  /// (n-q)^2/p^2.
  double sharp_constant() const;
  /// (n-q)/(2-q) - p/(p-2): P(lambda) is proportional to lambda to this power.
  double scaling_exponent() const;
  /// Within 1e-3 of an admissibility boundary. Slow-decay triples run with a
  /// doubled subdivision budget.
  bool slow_decay() const { return slow_decay_; }

  bool operator==(const ExponentTriple&) const = default;

 private:
  int n_;
  double p_, q_;
  bool slow_decay_ = false;
};

double kernel_h(const ExponentTriple& t, double lambda, double rho);
double kernel_g(const ExponentTriple& t, double lambda, double rho);

enum class PqrSelector { P, Q, R };

IntegralResult pqr(const ExponentTriple& t, double lambda, PqrSelector which,
                   const QuadratureSpec& spec = {});

/// One inequality evaluation. `ratio` is arranged so that the claim reads
/// ratio >= target; slack = ratio - target.
struct InequalityReport {
  std::string label;
  double param = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double target = 0.0;
  double slack = 0.0;
  std::vector<double> integrals;
  std::vector<double> integral_errors;
  double ratio_error = 0.0;  // first-order propagation of integral_errors

  /// |slack| <= 10 ratio_error.
  bool equality() const;
  /// slack >= -10 ratio_error.
  bool holds() const;
};

/// (u, u') pair for u(F(x - x0)), or a general function on a box.
struct RadialTest {
  RadialProfile u;
  RadialProfile du;  // empty eval: central differences of u.eval
};
struct GeneralTest {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;  // empty: central differences
  Box support;                                    // u = 0 outside
};

struct TestFunction {
  std::variant<RadialTest, GeneralTest> kind;
  Vector basepoint;

  static TestFunction radial(RadialProfile u, RadialProfile du = {}, Vector basepoint = {});
  static TestFunction general(std::function<double(const Vector&)> value,
                              std::function<Vector(const Vector&)> gradient, Box support,
                              Vector basepoint = {});
  bool is_radial() const { return std::holds_alternative<RadialTest>(kind); }
};

/// QR/P^2 against (n-q)^2/p^2 at each lambda.
std::vector<InequalityReport> check_pqr_identity(const ExponentTriple& t,
                                                 const std::vector<double>& lambdas,
                                                 const QuadratureSpec& spec = {});

/// |(1/(2-q))(-n + 2(p-q)/(p-2)) P + lambda P'| / P at each lambda.
std::vector<double> check_p_ode(const ExponentTriple& t, const std::vector<double>& lambdas,
                                const QuadratureSpec& spec = {});

/// Least-squares slope of log P against log lambda.
double fit_p_power(const ExponentTriple& t, const std::vector<double>& lambdas,
                   const QuadratureSpec& spec = {});

/// The extremal w_lambda = (lambda + rho^{2-q})^{1/(2-p)} with its derivative.
TestFunction interpolation_extremal(const ExponentTriple& t, double lambda);

/// A B / C^2 against (n-q)^2/p^2 with A = int F*(Du)^2, B = int |u|^{2p-2} F^{2-2q},
/// C = int |u|^p F^{-q}, all against the Busemann-Hausdorff measure.
InequalityReport interpolation_report(const MinkowskiNorm& norm, const ExponentTriple& t,
                                      const TestFunction& u, const QuadratureSpec& spec = {});

struct GaussianTCheck {
  double value = 0.0;       // 4 lambda omega_n int rho^{n+1} e^{-2 lambda rho^2}
  double closed_form = 0.0;  // 2 (2 lambda)^{-n/2} omega_n int t^{n+1} e^{-t^2}
  double rel_diff = 0.0;
  double error = 0.0;
};
GaussianTCheck gaussian_T(int n, double lambda, const QuadratureSpec& spec = {});
/// |-lambda T' - (n/2) T| / T.
double gaussian_T_ode_residual(int n, double lambda, const QuadratureSpec& spec = {});

/// e^{-lambda F(x - x0)^2}.
TestFunction gaussian_test(double lambda, Vector basepoint = {});

/// (int F*(Du)^2)(int F^2 u^2) / (int u^2)^2 against n^2/4.
InequalityReport hpw_report(const MinkowskiNorm& norm, int n, const TestFunction& u,
                            const QuadratureSpec& spec = {});

/// 2 lambda int F^2 e^{-2 lambda F^2} against (n/2) int e^{-2 lambda F^2}; ratio
/// lhs/rhs, target 1.
InequalityReport hpw_moment_identity(int n, double lambda, const QuadratureSpec& spec = {});

/// int F*(Du)^2 / int u^2/F^2 against (n-2)^2/4. Only c = 0 is meaningful on
/// flat space; other values throw.
InequalityReport hardy_report(const MinkowskiNorm& norm, int n, const TestFunction& u,
                              double c = 0.0, const QuadratureSpec& spec = {});

/// Quintic smoothstep cutoff: 1 on [0, r], 0 on [R, inf).
double smooth_cutoff(double rho, double r, double R);
double smooth_cutoff_derivative(double rho, double r, double R);

struct HardySweep {
  std::vector<InequalityReport> rows;  // param = epsilon; integrals = {I1, I2, I2 on [eps, r]}
  double limit = 0.0;                  // L in q = L + b/(ln(1/eps) + c)
  double b = 0.0;
  double c = 0.0;
  double plain_fit_limit = 0.0;  // L in q = L + b/ln(1/eps), for comparison
  bool non_increasing = false;
};

/// u_eps = max(eps, rho)^{-(n-2)/2} psi(rho) for each eps.
HardySweep hardy_sharpness_sweep(const MinkowskiNorm& norm, int n, double r, double R,
                                 const std::vector<double>& eps, const QuadratureSpec& spec = {});

/// lhs = int F*(Du)^2, rhs = (n-2)^2/4 int u^2/F^2 + (l/4) int u^2/(F^2 ln^2(eR/F)),
/// with l the uniformity constant of F*. Ratio lhs/rhs against 1.
InequalityReport double_hardy_report(const MinkowskiNorm& norm, int n, const TestFunction& u,
                                     double support_radius, double R,
                                     const QuadratureSpec& spec = {});

/// 1 - S(rho) on [0, 1] with S the quintic smoothstep.
TestFunction smoothstep_bump(double radius = 1.0, Vector basepoint = {});

}  // namespace uplab
