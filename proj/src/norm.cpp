#include "uplab/norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "uplab/errors.hpp"
#include "uplab/rng.hpp"

namespace uplab {

namespace {

void require_dimension(const MinkowskiNorm& norm, Eigen::Index size) {
  if (size != norm.dimension()) {
    std::ostringstream os;
    os << "dimension mismatch: norm on R^" << norm.dimension() << ", argument of size "
       << size;
    throw DomainError(os.str());
  }
}

Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                   double h) {
  Vector g(x.size());
  Vector xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    const double d1 = (f(xp) - f(xm)) / (2.0 * h);
    xp[i] = x[i] + 0.5 * h;
    xm[i] = x[i] - 0.5 * h;
    const double d2 = (f(xp) - f(xm)) / h;
    g[i] = (4.0 * d2 - d1) / 3.0;
    xp[i] = xm[i] = x[i];
  }
  return g;
}

// Conjugate exponent s = p/(p-1).
double conjugate(double p) { return p / (p - 1.0); }

double lp_value(const Vector& y, double p) {
  const double scale = y.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double v : y) sum += std::pow(std::abs(v) / scale, p);
  return scale * std::pow(sum, 1.0 / p);
}

// sup alpha(y)/F(y) over the Euclidean unit sphere by projected gradient
// ascent from a fixed lattice of starts.
double custom_dual(const MinkowskiNorm& norm, const Vector& alpha) {
  const int n = norm.dimension();
  auto objective = [&](const Vector& y) { return alpha.dot(y) / norm.value(y); };

  std::vector<Vector> starts = sphere_lattice(n, 32, 7);
  starts.push_back(alpha.normalized());

  double best = -std::numeric_limits<double>::infinity();
  Vector best_y;
  double best_residual = std::numeric_limits<double>::infinity();
  for (const Vector& start : starts) {
    Vector y = start;
    double phi = objective(y);
    double step = 1.0;
    double residual = 0.0;
    for (int it = 0; it < 2000; ++it) {
      const double fy = norm.value(y);
      Vector g = alpha / fy - (alpha.dot(y) / (fy * fy)) * norm.gradient(y);
      g -= g.dot(y) * y;
      residual = g.norm() / std::max(alpha.norm(), 1e-300);
      if (residual < 1e-11) break;
      bool moved = false;
      for (int tries = 0; tries < 60; ++tries) {
        Vector cand = (y + step * g).normalized();
        const double phi_c = objective(cand);
        if (phi_c > phi) {
          y = cand;
          phi = phi_c;
          step *= 2.0;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;  // no ascent direction left at double precision
    }
    if (phi > best) {
      best = phi;
      best_y = y;
      best_residual = residual;
    }
  }
  if (!(best_residual < 1e-6)) {
    std::ostringstream os;
    os << "dual norm maximization did not converge: best value " << best
       << ", tangential gradient " << best_residual << ", iterate [" << best_y.transpose()
       << "]";
    throw ConvergenceError(os.str());
  }
  return best;
}

}  // namespace

MinkowskiNorm MinkowskiNorm::euclidean(int n) {
  if (n < 1) throw DomainError("dimension must be positive");
  return weighted_euclidean(Eigen::MatrixXd::Identity(n, n));
}

MinkowskiNorm MinkowskiNorm::weighted_euclidean(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw DomainError("weighted-euclidean norm needs a square matrix");
  if (!a.isApprox(a.transpose(), 1e-12))
    throw DomainError("weighted-euclidean matrix must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success)
    throw DomainError("weighted-euclidean matrix must be positive definite");
  MinkowskiNorm norm;
  norm.n_ = static_cast<int>(a.rows());
  norm.family_ = NormFamily::WeightedEuclidean;
  norm.name_ = a.isIdentity() ? "euclidean" : "weighted-euclidean";
  norm.a_ = a;
  norm.a_inv_ = llt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
  return norm;
}

MinkowskiNorm MinkowskiNorm::lp(int n, double p) {
  if (n < 1) throw DomainError("dimension must be positive");
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("lp norm needs a finite exponent p > 1");
  MinkowskiNorm norm;
  norm.n_ = n;
  norm.family_ = NormFamily::Lp;
  norm.name_ = "lp";
  norm.p_ = p;
  return norm;
}

MinkowskiNorm MinkowskiNorm::custom(int n, ValueFn value, GradientFn gradient,
                                    std::string name) {
  if (n < 1) throw DomainError("dimension must be positive");
  if (!value) throw DomainError("custom norm needs a value function");
  MinkowskiNorm norm;
  norm.n_ = n;
  norm.family_ = NormFamily::Custom;
  norm.name_ = std::move(name);
  norm.value_ = std::move(value);
  norm.gradient_ = std::move(gradient);
  return norm;
}

double MinkowskiNorm::value(const Vector& y) const {
  require_dimension(*this, y.size());
  switch (family_) {
    case NormFamily::WeightedEuclidean:
      return std::sqrt(std::max(0.0, y.dot(a_ * y)));
    case NormFamily::Lp:
      return lp_value(y, p_);
    case NormFamily::Custom:
      return y.isZero(0.0) ? 0.0 : value_(y);
  }
  return 0.0;
}

Vector MinkowskiNorm::gradient(const Vector& y) const {
  require_dimension(*this, y.size());
  const double f = value(y);
  if (f == 0.0) throw DomainError("norm gradient is undefined at the origin");
  switch (family_) {
    case NormFamily::WeightedEuclidean:
      return (a_ * y) / f;
    case NormFamily::Lp: {
      Vector g(n_);
      for (int i = 0; i < n_; ++i)
        g[i] = std::copysign(std::pow(std::abs(y[i]) / f, p_ - 1.0), y[i]);
      return g;
    }
    case NormFamily::Custom:
      if (gradient_) return gradient_(y);
      return fd_gradient(value_, y, 1e-5 * y.norm());
  }
  return Vector::Zero(n_);
}

double DualityCertificate::defect() const {
  const double scale = std::max(dual_value, std::numeric_limits<double>::min());
  const double d1 = std::abs(primal_value - dual_value) / scale;
  const double d2 = std::abs(pairing - primal_value * dual_value) / (scale * scale);
  return std::max(d1, d2);
}

double norm_value(const MinkowskiNorm& norm, const Vector& y) { return norm.value(y); }

double dual_norm_value(const MinkowskiNorm& norm, const Covector& alpha) {
  require_dimension(norm, alpha.components.size());
  const Vector& a = alpha.components;
  if (!a.allFinite()) throw DomainError("covector has non-finite components");
  if (a.isZero(0.0)) return 0.0;
  switch (norm.family()) {
    case NormFamily::WeightedEuclidean:
      return std::sqrt(std::max(0.0, a.dot(norm.matrix_inverse() * a)));
    case NormFamily::Lp:
      return lp_value(a, conjugate(norm.exponent()));
    case NormFamily::Custom:
      return custom_dual(norm, a);
  }
  return 0.0;
}

DualityCertificate legendre_map(const MinkowskiNorm& norm, const Covector& alpha) {
  require_dimension(norm, alpha.components.size());
  const Vector& a = alpha.components;
  if (a.isZero(0.0))
    throw DomainError("Legendre certificate is undefined at alpha = 0 (J*(0) = 0)");

  DualityCertificate cert;
  cert.dual_value = dual_norm_value(norm, alpha);
  switch (norm.family()) {
    case NormFamily::WeightedEuclidean:
      cert.maximizer = norm.matrix_inverse() * a;
      break;
    case NormFamily::Lp: {
      const double s = conjugate(norm.exponent());
      const double scale = std::pow(cert.dual_value, 2.0 - s);
      cert.maximizer.resize(a.size());
      for (Eigen::Index i = 0; i < a.size(); ++i)
        cert.maximizer[i] = scale * std::copysign(std::pow(std::abs(a[i]), s - 1.0), a[i]);
      break;
    }
    case NormFamily::Custom: {
      auto half_sq = [&](const Vector& b) {
        const double v = dual_norm_value(norm, Covector{b});
        return 0.5 * v * v;
      };
      cert.maximizer = fd_gradient(half_sq, a, 1e-4 * cert.dual_value);
      break;
    }
  }
  if (!cert.maximizer.allFinite()) throw ConvergenceError("Legendre map gradient is not finite");
  cert.primal_value = norm.value(cert.maximizer);
  cert.pairing = a.dot(cert.maximizer);
  return cert;
}

std::vector<Vector> sphere_lattice(int n, int count, std::uint64_t offset) {
  if (n < 1 || count < 1) throw DomainError("sphere lattice needs n >= 1 and count >= 1");
  std::vector<Vector> pts;
  pts.reserve(count);
  if (n == 1) {
    for (int i = 0; i < count; ++i) pts.push_back(Vector::Constant(1, i % 2 ? -1.0 : 1.0));
    return pts;
  }
  if (n == 2) {
    // Midpoint angles never land on a coordinate axis when count % 4 == 0.
    const double shift = 0.5 + 0.5 * static_cast<double>(offset % 2);
    for (int i = 0; i < count; ++i) {
      const double t = 2.0 * std::numbers::pi * (i + 0.5 * shift) / count;
      Vector v(2);
      v << std::cos(t), std::sin(t);
      pts.push_back(v);
    }
    return pts;
  }
  // Kronecker (R_d) sequence in [0,1)^{2m}, pushed through Box-Muller and
  // normalised; Gaussian vectors are rotation invariant.
  const int m = (n + 1) / 2;
  const int d = 2 * m;
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (d + 1));
  std::vector<double> step(d);
  for (int j = 0; j < d; ++j) step[j] = std::fmod(std::pow(1.0 / phi, j + 1), 1.0);
  for (int i = 0; i < count; ++i) {
    const double idx = static_cast<double>(i + 1 + offset * 7919);
    Vector g(d);
    for (int k = 0; k < m; ++k) {
      double u1 = std::fmod(0.5 + idx * step[2 * k], 1.0);
      const double u2 = std::fmod(0.5 + idx * step[2 * k + 1], 1.0);
      u1 = std::max(u1, 1e-12);
      const double r = std::sqrt(-2.0 * std::log(u1));
      g[2 * k] = r * std::cos(2.0 * std::numbers::pi * u2);
      g[2 * k + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
    }
    Vector v = g.head(n);
    if (v.norm() == 0.0) v = Vector::Unit(n, i % n);
    pts.push_back(v.normalized());
  }
  return pts;
}

UniformityEstimate uniformity_constant(const MinkowskiNorm& norm,
                                       const QuadratureSpec& sampling) {
  sampling.validate();
  const int n = norm.dimension();
  const int count = sampling.lattice_points;
  const std::vector<Vector> alphas = sphere_lattice(n, count, 0);
  const std::vector<Vector> betas = sphere_lattice(n, count, 1);

  auto half_sq = [&](const Vector& a) {
    const double v = dual_norm_value(norm, Covector{a});
    return 0.5 * v * v;
  };
  std::vector<double> beta_dual(betas.size());
  for (std::size_t j = 0; j < betas.size(); ++j)
    beta_dual[j] = dual_norm_value(norm, Covector{betas[j]});

  UniformityEstimate best;
  best.value = std::numeric_limits<double>::infinity();
  for (const Vector& alpha : alphas) {
    const double h = 1e-4 * dual_norm_value(norm, Covector{alpha});
    const double f0 = half_sq(alpha);
    Eigen::MatrixXd hess(n, n);
    for (int i = 0; i < n; ++i) {
      Vector ei = Vector::Unit(n, i) * h;
      hess(i, i) = (half_sq(alpha + ei) - 2.0 * f0 + half_sq(alpha - ei)) / (h * h);
      for (int j = 0; j < i; ++j) {
        Vector ej = Vector::Unit(n, j) * h;
        const double v = (half_sq(alpha + ei + ej) - half_sq(alpha + ei - ej) -
                          half_sq(alpha - ei + ej) + half_sq(alpha - ei - ej)) /
                         (4.0 * h * h);
        hess(i, j) = hess(j, i) = v;
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(hess);
    if (llt.info() != Eigen::Success) {
      std::ostringstream os;
      os << "Hessian of F*^2/2 is not positive definite at alpha = [" << alpha.transpose()
         << "]";
      throw ConvergenceError(os.str());
    }
    auto consider = [&](const Vector& beta, double dual_beta) {
      const double ratio = beta.dot(hess * beta) / (dual_beta * dual_beta);
      if (ratio < best.value) {
        best.value = ratio;
        best.argmin_alpha = alpha;
        best.argmin_beta = beta;
      }
      ++best.samples;
    };
    for (std::size_t j = 0; j < betas.size(); ++j) consider(betas[j], beta_dual[j]);
    // beta = alpha gives exactly 1 by Euler's identity, bounding the infimum.
    consider(alpha, std::sqrt(2.0 * f0));
  }
  return best;
}

double unit_ball_lebesgue_volume(const MinkowskiNorm& norm, const QuadratureSpec& spec,
                                 double max_rel_error) {
  const int n = norm.dimension();
  switch (norm.family()) {
    case NormFamily::WeightedEuclidean:
      return unit_ball_volume(n) / std::sqrt(norm.matrix().determinant());
    case NormFamily::Lp: {
      const double p = norm.exponent();
      return std::pow(2.0 * std::tgamma(1.0 + 1.0 / p), n) / std::tgamma(1.0 + n / p);
    }
    case NormFamily::Custom:
      break;
  }
  // Vol{F < 1} = omega_n E[F(theta)^-n], theta uniform on the sphere.
  spec.validate();
  const CounterRng rng(spec.mc_seed);
  double mean = 0.0, m2 = 0.0;
  const std::uint64_t samples = spec.mc_samples;
  Vector g(n);
  for (std::uint64_t i = 0; i < samples; ++i) {
    for (int k = 0; k < n; ++k) g[k] = rng.normal(i, k);
    const double r = g.norm();
    if (r == 0.0) continue;
    const double v = std::pow(norm.value(g / r), -n);
    if (!std::isfinite(v)) throw DomainError("custom norm vanishes on the unit sphere");
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  const double se = std::sqrt(m2 / static_cast<double>(samples - 1) / samples);
  if (se > max_rel_error * mean) {
    std::ostringstream os;
    os << "Monte Carlo unit-ball volume: relative standard error " << se / mean
       << " exceeds " << max_rel_error;
    throw ConvergenceError(os.str());
  }
  return unit_ball_volume(n) * mean;
}

double bh_density(const MinkowskiNorm& norm, const QuadratureSpec& spec,
                  double max_rel_error) {
  const int n = norm.dimension();
  if (norm.family() == NormFamily::WeightedEuclidean)
    return std::sqrt(norm.matrix().determinant());
  return unit_ball_volume(n) / unit_ball_lebesgue_volume(norm, spec, max_rel_error);
}

double eikonal_defect(const MinkowskiNorm& norm, int directions) {
  double worst = 0.0;
  for (const Vector& y : sphere_lattice(norm.dimension(), directions, 3)) {
    const Covector df{norm.gradient(y)};
    worst = std::max(worst, std::abs(dual_norm_value(norm, df) - 1.0));
  }
  return worst;
}

}  // namespace uplab
