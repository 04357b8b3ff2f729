#include "uplab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <thread>

#include "uplab/errors.hpp"
#include "uplab/rng.hpp"

namespace uplab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// 21-point Kronrod extension of the 10-point Gauss rule; odd indices of the
// Kronrod abscissae are the Gauss nodes.
constexpr std::array<double, 11> kXgk = {
    0.00000000000000000e+00, 1.48874338981631211e-01, 2.94392862701460198e-01,
    4.33395394129247191e-01, 5.62757134668604683e-01, 6.79409568299024406e-01,
    7.80817726586416897e-01, 8.65063366688984511e-01, 9.30157491355708226e-01,
    9.73906528517171720e-01, 9.95657163025808081e-01};
constexpr std::array<double, 11> kWgk = {
    1.49445554002916906e-01, 1.47739104901338491e-01, 1.42775938577060081e-01,
    1.34709217311473326e-01, 1.23491976262065851e-01, 1.09387158802297642e-01,
    9.31254545836976055e-02, 7.50396748109199528e-02, 5.47558965743519960e-02,
    3.25581623079647275e-02, 1.16946388673718743e-02};
constexpr std::array<double, 5> kWg = {
    2.95524224714752870e-01, 2.69266719309996355e-01, 2.19086362515982044e-01,
    1.49451349150580593e-01, 6.66713443086881376e-02};

struct Panel {
  double a, b, value, error, resabs;
  bool operator<(const Panel& o) const { return error < o.error; }
};

double checked(const std::function<double(double)>& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "non-finite integrand value at x = " << x;
    throw DomainError(os.str());
  }
  return v;
}

Panel gk21(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = checked(f, center);
  double resk = fc * kWgk[0];
  double resg = 0.0;
  double resabs = std::abs(resk);
  std::array<double, 21> fv{};
  fv[0] = fc;
  for (int j = 1; j <= 10; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = checked(f, center - dx);
    const double f2 = checked(f, center + dx);
    fv[2 * j - 1] = f1;
    fv[2 * j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[(j - 1) / 2] * (f1 + f2);
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[0] * std::abs(fc - reskh);
  for (int j = 1; j <= 10; ++j)
    resasc += kWgk[j] * (std::abs(fv[2 * j - 1] - reskh) + std::abs(fv[2 * j] - reskh));

  const double value = resk * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps))
    err = std::max(50.0 * kEps * resabs, err);
  return {a, b, value, err, resabs};
}

// Neumaier-compensated sum in a fixed order.
struct CompensatedSum {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double total() const { return sum + comp; }
};

double weighted_value(double fv, double rho, const Weight& w) {
  if (fv == 0.0) return 0.0;
  return std::visit(
      [&](const auto& wt) -> double {
        using T = std::decay_t<decltype(wt)>;
        if constexpr (std::is_same_v<T, PowerWeight>) {
          if (wt.k == 0.0) return fv;
          const double v = fv * std::pow(rho, wt.k);
          if (std::isfinite(v) && v != 0.0) return v;
          return std::copysign(std::exp(std::log(std::abs(fv)) + wt.k * std::log(rho)), fv);
        } else if constexpr (std::is_same_v<T, GaussianWeight>) {
          return fv * std::exp(-wt.a * rho * rho);
        } else {
          if (wt.m == 0) return fv;
          if (rho < 20.0) return fv * std::pow(std::sinh(rho), wt.m);
          const double log_sinh =
              rho - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * rho));
          return std::copysign(std::exp(std::log(std::abs(fv)) + wt.m * log_sinh), fv);
        }
      },
      w);
}

double weight_origin_power(const Weight& w) {
  if (const auto* p = std::get_if<PowerWeight>(&w)) return p->k;
  if (const auto* s = std::get_if<SinhPowerWeight>(&w)) return s->m;
  return 0.0;
}

double last_landmark(const RadialProfile& f) {
  double x = std::max(f.scale, f.inner);
  for (double b : f.breakpoints) x = std::max(x, b);
  return x;
}

// Decay and origin class of |f|^power rho^-extra, given those of f.
DecayClass powered_decay(const DecayClass& d, double power, double extra) {
  if (const auto* a = std::get_if<AlgebraicDecay>(&d)) return AlgebraicDecay{a->sigma * power + extra};
  if (const auto* g = std::get_if<GaussianDecay>(&d)) return GaussianDecay{g->rate * power};
  return d;
}

OriginClass powered_origin(const OriginClass& o, double power, double extra) {
  double tau = extra;
  if (const auto* s = std::get_if<PowerSingularOrigin>(&o)) tau += s->tau * power;
  if (tau > 0.0) return PowerSingularOrigin{tau};
  return BoundedOrigin{};
}

}  // namespace

RadialProfile derived_profile(const RadialProfile& base, std::function<double(double)> eval,
                              double power, double extra) {
  RadialProfile r = base;
  r.eval = std::move(eval);
  r.decay = powered_decay(base.decay, power, extra);
  r.origin = powered_origin(base.origin, power, extra);
  return r;
}

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0)) throw DomainError("quadrature tolerance must be positive");
  if (max_subdivisions < 1) throw DomainError("max_subdivisions must be at least 1");
  if (mc_samples < (std::uint64_t{1} << 10))
    throw DomainError("mc_samples must be at least 2^10");
  if (lattice_points < 4) throw DomainError("lattice_points must be at least 4");
}

IntegralResult& IntegralResult::operator+=(const IntegralResult& other) {
  value += other.value;
  error += other.error;
  nodes += other.nodes;
  converged = converged && other.converged;
  return *this;
}

IntegralResult IntegralResult::scaled(double factor) const {
  return {value * factor, error * std::abs(factor), nodes, converged};
}

IntegralResult integrate(const std::function<double(double)>& f, double a,
                         double b, const QuadratureSpec& spec, double abs_tol) {
  if (a == b) return {};
  if (!(std::isfinite(a) && std::isfinite(b)))
    throw DomainError("integrate() needs finite limits; use radial_integral for tails");

  std::priority_queue<Panel> heap;
  heap.push(gk21(f, a, b));
  std::int64_t nodes = 21;
  double total = heap.top().value;
  double total_err = heap.top().error;
  int panels = 1;
  auto done = [&] {
    return total_err <= std::max(abs_tol, spec.rel_tol * std::abs(total));
  };
  while (!done() && panels < spec.max_subdivisions) {
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted
    heap.pop();
    Panel left = gk21(f, worst.a, mid);
    Panel right = gk21(f, mid, worst.b);
    nodes += 42;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }

  // Re-sum in interval order so the reported value does not depend on the
  // heap's internal layout.
  std::vector<Panel> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  CompensatedSum value, err;
  for (const auto& p : all) {
    value.add(p.value);
    err.add(p.error);
  }
  IntegralResult r{value.total(), err.total(), nodes, false};
  r.converged = r.error <= std::max(abs_tol, spec.rel_tol * std::abs(r.value));
  return r;
}

void verify_decay(const RadialProfile& f) {
  const double base = last_landmark(f);
  auto probe = [&](double rho) {
    const double v = f.eval(rho);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "profile is non-finite at probe radius " << rho;
      throw DomainError(os.str());
    }
    return std::abs(v);
  };
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, CompactSupport>) {
          for (double s : {1.001, 1.5, 2.0})
            if (probe(d.radius * s) != 0.0) {
              std::ostringstream os;
              os << "profile declared compact on radius " << d.radius
                 << " is nonzero at " << d.radius * s;
              throw DomainError(os.str());
            }
        } else if constexpr (std::is_same_v<T, AlgebraicDecay>) {
          const double p0 = std::max(1.0, base);
          const std::array<double, 3> r = {10.0 * p0, 100.0 * p0, 1000.0 * p0};
          std::array<double, 3> v{};
          for (int i = 0; i < 3; ++i) v[i] = probe(r[i]);
          for (int i = 0; i < 2; ++i) {
            if (v[i] == 0.0 || v[i + 1] == 0.0) continue;
            const double slope = -(std::log(v[i + 1]) - std::log(v[i])) /
                                 (std::log(r[i + 1]) - std::log(r[i]));
            if (slope < 0.5 * d.sigma) {
              std::ostringstream os;
              os << "declared algebraic decay rho^-" << d.sigma
                 << " but measured log-slope " << slope << " near rho = " << r[i + 1];
              throw DomainError(os.str());
            }
          }
        } else {
          const double w = 1.0 / std::sqrt(d.rate);
          const std::array<double, 3> r = {base + 4.0 * w, base + 6.0 * w, base + 8.0 * w};
          std::array<double, 3> v{};
          for (int i = 0; i < 3; ++i) v[i] = probe(r[i]);
          for (int i = 0; i < 2; ++i) {
            if (v[i] == 0.0 || v[i + 1] == 0.0) continue;
            const double rate = -(std::log(v[i + 1]) - std::log(v[i])) /
                                (r[i + 1] * r[i + 1] - r[i] * r[i]);
            if (rate < 0.5 * d.rate) {
              std::ostringstream os;
              os << "declared Gaussian decay rate " << d.rate << " but measured "
                 << rate << " near rho = " << r[i + 1];
              throw DomainError(os.str());
            }
          }
        }
      },
      f.decay);
}

IntegralResult radial_integral(const RadialProfile& f, const Weight& w,
                               const QuadratureSpec& spec) {
  spec.validate();
  if (!f.eval) throw DomainError("radial profile has no evaluator");
  if (f.inner < 0.0) throw DomainError("radial profile inner radius must be >= 0");

  // Integrability at the origin.
  const double tau = std::holds_alternative<PowerSingularOrigin>(f.origin)
                         ? std::get<PowerSingularOrigin>(f.origin).tau
                         : 0.0;
  const double origin_exp = weight_origin_power(w) - tau;
  if (f.inner == 0.0 && origin_exp <= -1.0) {
    std::ostringstream os;
    os << "non-integrable singularity at the origin (integrand ~ rho^" << origin_exp << ")";
    throw DomainError(os.str());
  }

  // Integrability at infinity and choice of the tail split T.
  enum class Tail { None, Algebraic, Gaussian } tail = Tail::None;
  double end = 0.0;          // finite end for compact profiles, else split T
  double tail_exponent = 0;  // combined algebraic decay of f w
  if (const auto* c = std::get_if<CompactSupport>(&f.decay)) {
    end = c->radius;
  } else if (const auto* alg = std::get_if<AlgebraicDecay>(&f.decay)) {
    if (const auto* pw = std::get_if<PowerWeight>(&w)) {
      tail_exponent = alg->sigma - pw->k;
      if (tail_exponent <= 1.0) {
        std::ostringstream os;
        os << "declared-integrability violation: integrand decays like rho^-"
           << tail_exponent << " at infinity";
        throw DomainError(os.str());
      }
      tail = Tail::Algebraic;
      end = std::max(1.0, 2.0 * last_landmark(f));
    } else if (const auto* gw = std::get_if<GaussianWeight>(&w)) {
      tail = Tail::Gaussian;
      end = last_landmark(f) + 8.0 / std::sqrt(gw->a);
    } else {
      throw DomainError(
          "Gaussian decay is mandatory against sinh growth; algebraic decay declared");
    }
  } else {
    const double rate = std::get<GaussianDecay>(f.decay).rate +
                        (std::holds_alternative<GaussianWeight>(w)
                             ? std::get<GaussianWeight>(w).a
                             : 0.0);
    if (!(rate > 0.0)) throw DomainError("Gaussian decay rate must be positive");
    double peak = 0.0;
    if (const auto* sw = std::get_if<SinhPowerWeight>(&w)) peak = sw->m / (2.0 * rate);
    tail = Tail::Gaussian;
    end = last_landmark(f) + peak + 8.0 / std::sqrt(rate);
  }
  verify_decay(f);

  if (end <= f.inner) {
    if (tail == Tail::None) return {};
    end = f.inner + 1.0;
  }

  auto integrand = [&](double rho) { return weighted_value(f.eval(rho), rho, w); };

  // Panel endpoints on [inner, end].
  std::vector<double> pts{f.inner};
  for (double b : f.breakpoints)
    if (b > f.inner && b < end) pts.push_back(b);
  if (f.inner == 0.0 && end > 1.0) pts.push_back(1.0);
  pts.push_back(end);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  // Decade splitting for panels spanning many orders of magnitude.
  std::vector<double> fine{pts.front()};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double lo = pts[i - 1], hi = pts[i];
    if (lo > 0.0 && hi / lo > 100.0)
      for (double x = lo * 10.0; x < hi / 1.5; x *= 10.0) fine.push_back(x);
    fine.push_back(hi);
  }
  pts = std::move(fine);

  struct Piece {
    std::function<double(double)> g;
    double a, b;
  };
  std::vector<Piece> pieces;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double a = pts[i - 1], b = pts[i];
    if (a == 0.0 && tau > 0.0 && origin_exp < 0.0) {
      // rho = b s^m flattens rho^origin_exp into s^0.
      const double m = 1.0 / (1.0 + origin_exp);
      pieces.push_back({[=, &integrand](double s) {
                          const double rho = b * std::pow(s, m);
                          if (rho == 0.0) return 0.0;
                          return integrand(rho) * b * m * std::pow(s, m - 1.0);
                        },
                        0.0, 1.0});
    } else {
      pieces.push_back({integrand, a, b});
    }
  }
  if (tail == Tail::Algebraic) {
    // rho = T s^{-1/(e-1)} maps [T, inf) to (0, 1] and flattens rho^-e.
    const double T = end;
    const double m = 1.0 / (tail_exponent - 1.0);
    pieces.push_back({[=, &integrand](double s) {
                        const double rho = T * std::pow(s, -m);
                        if (!std::isfinite(rho)) return 0.0;
                        return integrand(rho) * T * m * std::pow(s, -m - 1.0);
                      },
                      0.0, 1.0});
  } else if (tail == Tail::Gaussian) {
    const double T = end;
    pieces.push_back({[=, &integrand](double t) {
                        const double u = 1.0 - t;
                        const double rho = T + t / u;
                        if (!std::isfinite(rho)) return 0.0;
                        return integrand(rho) / (u * u);
                      },
                      0.0, 1.0});
  }

  // Rough magnitude from one rule per piece sets a shared absolute target.
  double rough = 0.0;
  for (const auto& p : pieces) rough += gk21(p.g, p.a, p.b).resabs;
  const double abs_tol = 0.1 * spec.rel_tol * rough / static_cast<double>(pieces.size());

  IntegralResult total;
  CompensatedSum value;
  for (const auto& p : pieces) {
    IntegralResult r = integrate(p.g, p.a, p.b, spec, abs_tol);
    value.add(r.value);
    total.error += r.error;
    total.nodes += r.nodes;
  }
  total.value = value.total();
  total.converged = total.error <= std::max(spec.rel_tol * std::abs(total.value),
                                            spec.rel_tol * 1e-3 * rough);
  if (!total.converged) {
    std::ostringstream os;
    os << "radial integral did not reach relative tolerance " << spec.rel_tol
       << " (value " << total.value << ", error " << total.error << ", "
       << total.nodes << " nodes)";
    throw ConvergenceError(os.str());
  }
  return total;
}

double unit_ball_volume(int n) {
  if (n < 1) throw DomainError("dimension must be positive");
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

IntegralResult flat_radial_volume_integral(const RadialProfile& f, int n,
                                           const QuadratureSpec& spec) {
  const double c = n * unit_ball_volume(n);
  return radial_integral(f, PowerWeight{static_cast<double>(n - 1)}, spec).scaled(c);
}

IntegralResult hyperbolic_radial_volume_integral(const RadialProfile& f, int n,
                                                 const QuadratureSpec& spec) {
  const double c = n * unit_ball_volume(n);
  return radial_integral(f, SinhPowerWeight{n - 1}, spec).scaled(c);
}

double Box::volume() const {
  double v = 1.0;
  for (Eigen::Index i = 0; i < lower.size(); ++i) v *= upper[i] - lower[i];
  return v;
}

Box Box::cube(int n, double half_width) {
  return {Eigen::VectorXd::Constant(n, -half_width), Eigen::VectorXd::Constant(n, half_width)};
}

IntegralResult monte_carlo_integral(
    const std::function<double(const Eigen::VectorXd&)>& integrand,
    const Box& region, const QuadratureSpec& spec) {
  spec.validate();
  const int n = region.dimension();
  if (n < 1 || region.upper.size() != n) throw DomainError("malformed integration box");
  for (int d = 0; d < n; ++d)
    if (!(region.upper[d] > region.lower[d])) throw DomainError("empty integration box");

  const CounterRng rng(spec.mc_seed);
  const std::uint64_t total = spec.mc_samples;
  constexpr std::uint64_t kBatches = 256;
  struct Moments {
    double count = 0, mean = 0, m2 = 0;
  };
  std::vector<Moments> batch(kBatches);

  auto run_batch = [&](std::uint64_t b) {
    const std::uint64_t begin = total * b / kBatches;
    const std::uint64_t stop = total * (b + 1) / kBatches;
    Eigen::VectorXd x(n);
    Moments m;
    for (std::uint64_t i = begin; i < stop; ++i) {
      for (int d = 0; d < n; ++d)
        x[d] = region.lower[d] + (region.upper[d] - region.lower[d]) * rng.uniform(i, d);
      const double v = integrand(x);
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "non-finite integrand sample at index " << i;
        throw DomainError(os.str());
      }
      m.count += 1.0;
      const double delta = v - m.mean;
      m.mean += delta / m.count;
      m.m2 += delta * (v - m.mean);
    }
    batch[b] = m;
  };

  const unsigned workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::vector<std::future<void>> jobs;
  for (unsigned w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::uint64_t b = w; b < kBatches; b += workers) run_batch(b);
    }));
  for (auto& j : jobs) j.get();

  // Chan et al. pairwise combination, always in batch order.
  Moments acc;
  for (const auto& m : batch) {
    if (m.count == 0) continue;
    const double count = acc.count + m.count;
    const double delta = m.mean - acc.mean;
    acc.mean += delta * m.count / count;
    acc.m2 += m.m2 + delta * delta * acc.count * m.count / count;
    acc.count = count;
  }
  const double vol = region.volume();
  const double var = acc.count > 1 ? acc.m2 / (acc.count - 1) : 0.0;
  return {vol * acc.mean, vol * std::sqrt(var / acc.count),
          static_cast<std::int64_t>(total), true};
}

double fd_derivative(const std::function<double(double)>& f, double lambda) {
  const double h = 1e-5 * (lambda == 0.0 ? 1.0 : std::abs(lambda));
  auto central = [&](double step) {
    const double up = f(lambda + step);
    const double down = f(lambda - step);
    if (!std::isfinite(up) || !std::isfinite(down))
      throw DomainError("non-finite evaluation in finite difference");
    return (up - down) / (2.0 * step);
  };
  const double coarse = central(h);
  const double fine = central(0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace uplab
