#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "uplab/quadrature.hpp"

namespace uplab {

using Vector = Eigen::VectorXd;

/// A linear functional acting on vectors by the dot pairing.
struct Covector {
  Vector components;

  double operator()(const Vector& y) const { return components.dot(y); }
  int dimension() const { return static_cast<int>(components.size()); }
};

enum class NormFamily { WeightedEuclidean, Lp, Custom };

/// Reversible Minkowski norm on flat n-space. Immutable once built; copies
/// share nothing mutable, so instances may be used from any thread.
class MinkowskiNorm {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;

  static MinkowskiNorm euclidean(int n);
  /// F(y) = sqrt(y^T A y); A must be symmetric positive definite.
  static MinkowskiNorm weighted_euclidean(const Eigen::MatrixXd& a);
  /// F(y) = (sum |y_i|^p)^{1/p}, p > 1.
  static MinkowskiNorm lp(int n, double p);
  /// User-supplied norm. The gradient handle may be empty, in which case
  /// central differences are used.
  static MinkowskiNorm custom(int n, ValueFn value, GradientFn gradient = {},
                              std::string name = "custom");

  int dimension() const { return n_; }
  NormFamily family() const { return family_; }
  const std::string& name() const { return name_; }
  double exponent() const { return p_; }
  const Eigen::MatrixXd& matrix() const { return a_; }
  const Eigen::MatrixXd& matrix_inverse() const { return a_inv_; }

  double value(const Vector& y) const;
  /// Gradient of F at y != 0.
  Vector gradient(const Vector& y) const;

 private:
  MinkowskiNorm() = default;

  int n_ = 0;
  NormFamily family_ = NormFamily::WeightedEuclidean;
  std::string name_;
  double p_ = 2.0;
  Eigen::MatrixXd a_;
  Eigen::MatrixXd a_inv_;
  ValueFn value_;
  GradientFn gradient_;
};

/// Output of the Legendre map: y = J*(alpha) with F(y) = F*(alpha) and
/// alpha(y) = F(y) F*(alpha).
struct DualityCertificate {
  double primal_value = 0.0;  // F(y)
  double dual_value = 0.0;    // F*(alpha)
  Vector maximizer;           // y
  double pairing = 0.0;       // alpha(y)

  /// Largest relative defect among the two certificate identities.
  double defect() const;
};

double norm_value(const MinkowskiNorm& norm, const Vector& y);

/// Polar transform F*(alpha) = sup alpha(y)/F(y). Closed form for the
/// weighted-euclidean and lp families; projected gradient ascent with 32
/// lattice restarts for custom norms (throws ConvergenceError on failure).
double dual_norm_value(const MinkowskiNorm& norm, const Covector& alpha);

/// Gradient of (1/2) F*^2 at alpha != 0, with its certificate.
DualityCertificate legendre_map(const MinkowskiNorm& norm, const Covector& alpha);

struct UniformityEstimate {
  double value = 1.0;
  Vector argmin_alpha;
  Vector argmin_beta;
  long samples = 0;
};

/// Lattice infimum of g*_alpha(beta, beta) / F*(beta)^2, where g* is the
/// central-difference Hessian of (1/2) F*^2 with step 1e-4 F*(alpha).
UniformityEstimate uniformity_constant(const MinkowskiNorm& norm,
                                       const QuadratureSpec& sampling = {});

/// Lebesgue volume of {F < 1}: closed form for the analytic families, Monte
/// Carlo over directions for custom norms.
double unit_ball_lebesgue_volume(const MinkowskiNorm& norm,
                                 const QuadratureSpec& spec = {},
                                 double max_rel_error = 5e-3);

/// Busemann-Hausdorff density c_n = omega_n / Vol{F < 1}.
double bh_density(const MinkowskiNorm& norm, const QuadratureSpec& spec = {},
                  double max_rel_error = 5e-3);

/// Max over a direction lattice of |F*(DF(y)) - 1|: the eikonal defect of the
/// distance function x -> F(x - x0).
double eikonal_defect(const MinkowskiNorm& norm, int directions = 16);

/// Unit vectors forming a deterministic low-discrepancy lattice on S^{n-1}.
std::vector<Vector> sphere_lattice(int n, int count, std::uint64_t offset = 0);

}  // namespace uplab
