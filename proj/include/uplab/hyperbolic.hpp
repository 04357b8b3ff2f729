#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "uplab/flat.hpp"
#include "uplab/quadrature.hpp"

namespace uplab {

/// Comparison cotangent: 1/rho for c = 0, sqrt|c| coth(sqrt|c| rho) for c < 0.
double ct(double c, double rho);
/// rho ct_c(rho) - 1, with D(c, 0) = 0.
double D(double c, double rho);

/// d(0, x) = ln((1+|x|)/(1-|x|)) on the Poincare ball.
double hyp_distance(const Vector& x);
double hyp_distance_from_radius(double r);
/// Conformal factor 2/(1 - |x|^2).
double conformal_factor(const Vector& x);

/// u(d(0, x)) with first and (optionally) second derivative in d.
struct RadialHypFunction {
  RadialProfile u;
  RadialProfile du;
  std::function<double(double)> d2u;  // empty: central differences of du
};

/// e^{-alpha d^2 - beta d}.
RadialHypFunction hyperbolic_gaussian(double alpha, double beta = 0.0);

/// u'' + (n-1) coth(rho) u' in geodesic polar coordinates.
double radial_laplacian(const RadialHypFunction& u, int n, double rho);
/// Same operator through the conformal ball coordinates at Euclidean radius r:
/// p^-2 [f_rr + ((n-1)/r + (n-2) p'/p) f_r] with f(r) = u(d(r)).
double ball_radial_laplacian(const RadialHypFunction& u, int n, double r);

struct ComparisonRow {
  double c = 0.0;
  double rho = 0.0;
  double laplacian = 0.0;  // Laplacian of d, ball coordinates
  double bound = 0.0;      // (n-1) ct_c(rho)
  bool holds = false;      // laplacian >= bound (relative 1e-12 slack)
  bool equality = false;   // |laplacian - bound| <= 1e-12 relative
};
/// For each c in {0, -1} and grid point: Laplacian of d at |x| = tanh(rho/2),
/// against (n-1) ct_c(d(x)).
std::vector<ComparisonRow> laplace_comparison_check(int n, const std::vector<double>& cs,
                                                    const std::vector<double>& rho_grid);

struct VolumeRatioRow {
  double rho = 0.0;
  double volume = 0.0;  // n omega_n int_0^rho sinh^{n-1}
  double ratio = 0.0;   // volume / rho^n
  double error = 0.0;
};
struct VolumeRatioReport {
  std::vector<VolumeRatioRow> rows;
  bool non_decreasing = true;  // up to 1e-10
  bool above_flat = true;      // ratio >= omega_n (1e-12 relative slack)
};
VolumeRatioReport hyp_volume_ratio_check(int n, const std::vector<double>& rho_grid,
                                         const QuadratureSpec& spec = {});

/// Volume of the geodesic ball B(0, rho) by Monte Carlo over the Euclidean ball
/// of radius tanh(rho/2) with density p(x)^n.
IntegralResult hyp_ball_volume_monte_carlo(int n, double rho, const QuadratureSpec& spec = {});

/// (int |grad u|^2)(int d^2 u^2) / (int u^2)^2 against n^2/4.
InequalityReport hpw_hyperbolic_report(const RadialHypFunction& u, int n,
                                       const QuadratureSpec& spec = {});

/// Same numerator over (int (1 + ((n-1)/n) D_{-1}(d)) u^2)^2.
InequalityReport modified_hpw_report(const RadialHypFunction& u, int n,
                                     const QuadratureSpec& spec = {});
InequalityReport modified_hpw_report(double alpha, int n, const QuadratureSpec& spec = {});

/// First: int |grad u|^2 against (n-2)^2/4 int (1 + 2(n-1)/(n-2) D_{-1}(d)) u^2/d^2.
/// Second: against (n-2)^2/4 int u^2/d^2 + 3(n-1)(n-2)/2 int u^2/(pi^2 + d^2).
/// Both use ratio lhs/rhs and target 1. integrals = {grad, u^2/d^2, D u^2/d^2}
/// and {grad, u^2/d^2, u^2/(pi^2+d^2)}.
std::pair<InequalityReport, InequalityReport> hardy_hyperbolic_report(
    const RadialHypFunction& u, int n, const QuadratureSpec& spec = {});

/// min over the grid of rho coth rho - 1 - 3 rho^2/(pi^2 + rho^2).
double corollary_bound_margin(const std::vector<double>& rho_grid);

/// C_k(alpha) = k omega_k int_0^inf e^{-alpha rho^2} sinh^{k-1}(rho) drho,
/// returned as (log scale s, value e^{-s} C_k) so large values do not overflow.
std::pair<double, IntegralResult> ko_c_scaled(int k, double alpha, const QuadratureSpec& spec = {});
double ko_c(int k, double alpha, const QuadratureSpec& spec = {});
/// ((n-1)/(n-2))(n-1 + 2 pi C_{n-2}(alpha)/C_n(alpha)) - alpha.
double ko_phi(int n, double alpha, const QuadratureSpec& spec = {});

struct SignChange {
  double lo = 0.0, hi = 0.0;  // bracket on the scan grid
  double root = 0.0;          // bisection refinement
};
struct KoScan {
  std::vector<double> alpha;
  std::vector<double> phi;
  std::vector<SignChange> sign_changes;
};
/// Phi on alpha_i = lo + (hi - lo) i / nodes, i = 1..nodes, with bisection on
/// every bracket. An empty range (hi <= lo or nodes == 0) gives an empty scan.
KoScan ko_alpha_scan(int n, double lo, double hi, int nodes, const QuadratureSpec& spec = {});

struct ChpwBounds {
  double lower = 0.0;
  double upper = 0.0;
  double argmin_alpha = 0.0;
  double argmin_beta = 0.0;
  std::vector<InequalityReport> trials;  // param = alpha
  std::vector<double> trial_beta;        // beta of each trial
};
/// Bounds for the sharp hyperbolic HPW constant from the family e^{-alpha d^2 - beta d}.
ChpwBounds hpw_constant_bounds(int n, const std::vector<double>& alphas,
                               const std::vector<double>& betas, const QuadratureSpec& spec = {});
/// Default trial grid: alpha log-spaced on [0.02, 50] (25 points), beta in {0, 0.25, 0.5, 1, 2, 4}.
ChpwBounds hpw_constant_bounds(int n, const QuadratureSpec& spec = {});

}  // namespace uplab
