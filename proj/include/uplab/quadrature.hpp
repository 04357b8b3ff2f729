#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace uplab {

/// Accuracy and sampling knobs shared by every integral in the library.
struct QuadratureSpec {
  double rel_tol = 1e-9;
  int max_subdivisions = 60;  // per integration panel
  std::uint64_t mc_samples = std::uint64_t{1} << 20;
  std::uint64_t mc_seed = 0x5EED;
  int lattice_points = 128;  // per sphere, for lattice infima

  void validate() const;  // throws DomainError
  bool operator==(const QuadratureSpec&) const = default;
};

struct IntegralResult {
  double value = 0.0;
  double error = 0.0;
  std::int64_t nodes = 0;
  bool converged = true;

  IntegralResult& operator+=(const IntegralResult& other);
  IntegralResult scaled(double factor) const;
};

// ---- radial profile classes -------------------------------------------------

struct AlgebraicDecay {
  double sigma;  // |f(rho)| = O(rho^-sigma) as rho -> inf
};
struct GaussianDecay {
  double rate;  // |f(rho)| = O(exp(-rate rho^2))
};
struct CompactSupport {
  double radius;  // f = 0 for rho >= radius
};
using DecayClass = std::variant<AlgebraicDecay, GaussianDecay, CompactSupport>;

struct BoundedOrigin {};
struct PowerSingularOrigin {
  double tau;  // |f(rho)| = O(rho^-tau) as rho -> 0
};
using OriginClass = std::variant<BoundedOrigin, PowerSingularOrigin>;

/// A scalar function of the distance rho together with what is known about
/// its behaviour at 0 and at infinity.
struct RadialProfile {
  std::function<double(double)> eval;
  DecayClass decay = GaussianDecay{1.0};
  OriginClass origin = BoundedOrigin{};
  double inner = 0.0;               // f vanishes on [0, inner)
  std::vector<double> breakpoints;  // kinks or jumps of f
  double scale = 0.0;               // radius past which the asymptotics apply
};

struct PowerWeight {
  double k;  // rho^k
};
struct GaussianWeight {
  double a;  // exp(-a rho^2)
};
struct SinhPowerWeight {
  int m;  // sinh(rho)^m
};
using Weight = std::variant<PowerWeight, GaussianWeight, SinhPowerWeight>;

// ---- one-dimensional primitives --------------------------------------------

/// Global adaptive 21-point Gauss-Kronrod on a finite interval. Never throws
/// on non-convergence; the result is flagged instead.
IntegralResult integrate(const std::function<double(double)>& f, double a,
                         double b, const QuadratureSpec& spec,
                         double abs_tol = 0.0);

/// Spot-checks the declared decay class at three probe radii. Throws
/// DomainError when the measured decay is slower than half the declared one.
void verify_decay(const RadialProfile& f);

/// Integral over [0, inf) (or the declared support) of f(rho) w(rho).
/// Throws DomainError when the declared classes make the integral divergent
/// and ConvergenceError when the tolerance is not met.
IntegralResult radial_integral(const RadialProfile& f, const Weight& w,
                               const QuadratureSpec& spec);

/// Profile evaluated by `eval` standing for |f|^power rho^-extra, with decay
/// and origin classes derived from those of `base`.
RadialProfile derived_profile(const RadialProfile& base, std::function<double(double)> eval,
                              double power, double extra);

/// Volume of the unit Euclidean ball, pi^{n/2} / Gamma(n/2 + 1).
double unit_ball_volume(int n);

/// n omega_n int f(rho) rho^{n-1} drho: the Busemann-Hausdorff integral of
/// x -> f(F(x - x0)) over a flat n-dimensional normed space, for any norm F.
IntegralResult flat_radial_volume_integral(const RadialProfile& f, int n,
                                           const QuadratureSpec& spec);

/// n omega_n int f(rho) sinh(rho)^{n-1} drho: integral over hyperbolic
/// n-space of a function of the distance to a fixed point.
IntegralResult hyperbolic_radial_volume_integral(const RadialProfile& f, int n,
                                                 const QuadratureSpec& spec);

// ---- Monte Carlo -----------------------------------------------------------

struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  double volume() const;
  int dimension() const { return static_cast<int>(lower.size()); }
  static Box cube(int n, double half_width);
};

/// Box volume times the sample mean; error is one standard error. Samples come
/// from CounterRng(spec.mc_seed), so results are bit-identical for equal specs
/// regardless of how many threads evaluate the batches.
IntegralResult monte_carlo_integral(
    const std::function<double(const Eigen::VectorXd&)>& integrand,
    const Box& region, const QuadratureSpec& spec);

/// Central difference with relative step 1e-5, one Richardson extrapolation.
double fd_derivative(const std::function<double(double)>& f, double lambda);

}  // namespace uplab
