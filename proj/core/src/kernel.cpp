#include "hypowiener/kernel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "hypowiener/error.hpp"
#include "hypowiener/random.hpp"

namespace hypowiener {

namespace {

constexpr double kFloor = 1e-300;
const double kLogFloor = std::log(kFloor);
constexpr double kInf = std::numeric_limits<double>::infinity();

double exp_with_floor(double log_value) { return log_value < kLogFloor ? 0.0 : std::exp(log_value); }

struct Quad {
  double value;
  double error;
};

// Adaptive Gauss-Kronrod over R^dim after an affine change of variables
// xi = center + scale * y. f receives y.
Quad integrate_rn(int dim, const std::function<double(const double*)>& f, double tol, unsigned depth) {
  double y[3] = {0, 0, 0};
  std::function<Quad(int)> level = [&](int k) -> Quad {
    auto inner = [&](double v) {
      y[k] = v;
      if (k == dim - 1) return f(y);
      return level(k + 1).value;
    };
    double err = 0.0;
    const double val =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(inner, -kInf, kInf, depth, tol, &err);
    return {val, err};
  };
  return level(0);
}

}  // namespace

HeatKernel::HeatKernel(GroupModel model, QuadratureConfig cfg) : model_(model), cfg_(cfg) {
  require(cfg_.rel_tol > 0.0 && cfg_.accept_tol > 0.0, "quadrature tolerances must be positive");
  if (cfg_.memoize) memo_ = shared_kernel_memo();
}

double HeatKernel::log_profile(const Point& g) const {
  model_.check_point(g);
  if (model_.kind() == GroupKind::Euclidean) {
    double r2 = 0.0;
    for (double c : g.coords()) r2 += c * c;
    return -0.5 * model_.topological_dimension() * std::log(4.0 * std::numbers::pi) - 0.25 * r2;
  }
  const double h2 = g[0] * g[0] + g[1] * g[1];
  const double v = std::abs(g[2]);
  double cached = 0.0;
  if (memo_ && memo_->lookup(h2, v, cached)) return cached;
  const double value = heisenberg_log_p1(h2, v, cfg_).log_value;
  if (memo_) memo_->insert(h2, v, value);
  return value;
}

double HeatKernel::log_local(const Point& g, double s) const {
  if (!(s > 0.0)) return -kInf;
  const double q = model_.homogeneous_dimension();
  return -0.5 * q * std::log(s) + log_profile(model_.dilate(1.0 / std::sqrt(s), g));
}

double HeatKernel::local(const Point& g, double s) const { return exp_with_floor(log_local(g, s)); }

double HeatKernel::log_on_diagonal(double s) const { return log_local(model_.identity(), s); }

double HeatKernel::log_gamma(const SpaceTimePoint& z, const SpaceTimePoint& zeta) const {
  return log_local(model_.local_offset(zeta.x, z.x), z.t - zeta.t);
}

double HeatKernel::operator()(const SpaceTimePoint& z, const SpaceTimePoint& zeta) const {
  return exp_with_floor(log_gamma(z, zeta));
}

double gamma_euclidean(const GroupModel& model, const SpaceTimePoint& z, const SpaceTimePoint& zeta) {
  require(model.kind() == GroupKind::Euclidean, "gamma_euclidean needs a Euclidean model");
  return HeatKernel(model)(z, zeta);
}

double gaussian_G(const GroupModel& model, double a, const SpaceTimePoint& z, const SpaceTimePoint& zeta) {
  require(a > 0.0, "Gaussian exponent must be positive");
  const double s = z.t - zeta.t;
  if (!(s > 0.0)) return 0.0;
  const double d = model.distance(z.x, zeta.x);
  return std::exp(-a * d * d / s) / model.ball_volume(std::sqrt(s));
}

// ---------------------------------------------------------------------------

IntegralEstimate normalization_check(const HeatKernel& kernel, const Point& x0, double t, double tau,
                                     const IntegrationBudget& budget) {
  require(t > tau, "normalization check needs t > tau");
  const GroupModel& model = kernel.model();
  model.check_point(x0);
  const double s = t - tau;
  const double scale = std::sqrt(s);
  const int n = model.topological_dimension();

  if (model.kind() == GroupKind::Euclidean) {
    // xi = x0 + sqrt(s) y; Gamma depends on y only through |y|.
    auto f = [&](const double* y) {
      Point g = Point::zeros(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) g[i] = scale * y[i];
      return std::exp(kernel.log_local(g, s) + 0.5 * n * std::log(s));
    };
    const Quad q = integrate_rn(n, f, budget.tolerance, 15);
    if (!(q.error <= std::max(budget.tolerance, 1e-12) * 10.0))
      throw NumericalError("normalization quadrature missed its tolerance");
    return {q.value, q.error, 0};
  }

  // Heisenberg: importance sampling with the exact horizontal marginal
  // N(0, 2s I) and a Laplace conditional for the vertical coordinate whose
  // scale follows the conditional variance of the Levy area.
  const std::size_t n_samples = budget.mc_samples;
  require(n_samples >= 2, "Monte Carlo normalization needs at least two samples");
  struct Acc {
    double sum = 0.0, sum_sq = 0.0;
  };
  const auto blocks = map_blocks<Acc>(n_samples, 4096, [&](std::size_t, std::size_t begin, std::size_t end) {
    Acc acc;
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(budget.seed, i);
      const double wx = std::sqrt(2.0 * s) * rng.normal();
      const double wy = std::sqrt(2.0 * s) * rng.normal();
      const double w2 = wx * wx + wy * wy;
      const double b = std::sqrt((s * s / 6.0) * (1.0 + w2 / (2.0 * s)));
      const double u = rng.uniform() - 0.5;
      const double zc = -b * std::copysign(std::log(1.0 - 2.0 * std::abs(u)), u);
      const double log_q = -std::log(4.0 * std::numbers::pi * s) - w2 / (4.0 * s) - std::log(2.0 * b) - std::abs(zc) / b;
      // Left-invariance: integrate over offsets g = xi^{-1} o x0.
      const double w = std::exp(kernel.log_local(Point{wx, wy, zc}, s) - log_q);
      acc.sum += w;
      acc.sum_sq += w * w;
    }
    return acc;
  });
  Acc total;
  for (const Acc& a : blocks) {
    total.sum += a.sum;
    total.sum_sq += a.sum_sq;
  }
  const double mean = total.sum / static_cast<double>(n_samples);
  const double var = std::max(0.0, total.sum_sq / static_cast<double>(n_samples) - mean * mean);
  return {mean, 1.96 * std::sqrt(var / static_cast<double>(n_samples)), n_samples};
}

IntegralEstimate chapman_kolmogorov_check(const HeatKernel& kernel, const SpaceTimePoint& z, double tau,
                                          const SpaceTimePoint& eta, const IntegrationBudget& budget) {
  require(z.t > tau && tau > eta.t, "Chapman-Kolmogorov check needs t > tau > s");
  const GroupModel& model = kernel.model();
  const int n = model.topological_dimension();
  const double t1 = z.t - tau;    // later leg
  const double t2 = tau - eta.t;  // earlier leg
  const double total_lag = z.t - eta.t;
  // Offsets relative to eta: the product depends on h = y^{-1} o xi only.
  const Point g = model.local_offset(eta.x, z.x);
  const double direct = std::exp(kernel.log_local(g, total_lag));
  require(direct > 0.0, "Gamma(z, eta) underflows; choose closer points");

  if (model.kind() == GroupKind::Euclidean) {
    const double frac = t2 / total_lag;
    const double scale = std::sqrt(2.0 * t1 * t2 / total_lag);
    auto f = [&](const double* y) {
      Point h = Point::zeros(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) h[i] = frac * g[i] + scale * y[i];
      const Point back = model.compose(model.inverse(h), g);
      return std::exp(kernel.log_local(back, t1) + kernel.log_local(h, t2) + n * std::log(scale));
    };
    const Quad q = integrate_rn(n, f, budget.tolerance, 15);
    return {std::abs(q.value - direct) / direct, std::abs(q.error) / direct, 0};
  }

  // Heisenberg: defensive mixture of a bridge-shaped proposal and a 3x wider copy.
  const double frac = t2 / total_lag;
  const double hvar = 2.0 * t1 * t2 / total_lag;
  const double b0 = 0.5 * std::max(t1, t2) + 0.25 * std::sqrt(g[0] * g[0] + g[1] * g[1]) * std::sqrt(hvar);
  const double zc0 = frac * g[2];
  auto log_component = [&](double wx, double wy, double zz, double widen) {
    const double v = hvar * widen * widen;
    const double b = b0 * widen;
    const double dx = wx - frac * g[0], dy = wy - frac * g[1];
    return -std::log(2.0 * std::numbers::pi * v) - (dx * dx + dy * dy) / (2.0 * v) - std::log(2.0 * b) -
           std::abs(zz - zc0) / b;
  };
  struct Acc {
    double sum = 0.0, sum_sq = 0.0;
  };
  const std::size_t n_samples = budget.mc_samples;
  const auto blocks = map_blocks<Acc>(n_samples, 4096, [&](std::size_t, std::size_t begin, std::size_t end) {
    Acc acc;
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(budget.seed, i);
      const double widen = rng.uniform() < 0.5 ? 1.0 : 3.0;
      const double sd = std::sqrt(hvar) * widen;
      const double wx = frac * g[0] + sd * rng.normal();
      const double wy = frac * g[1] + sd * rng.normal();
      const double u = rng.uniform() - 0.5;
      const double zz = zc0 - b0 * widen * std::copysign(std::log(1.0 - 2.0 * std::abs(u)), u);
      const double l1 = log_component(wx, wy, zz, 1.0), l3 = log_component(wx, wy, zz, 3.0);
      const double lmax = std::max(l1, l3);
      const double log_q = lmax + std::log(0.5 * std::exp(l1 - lmax) + 0.5 * std::exp(l3 - lmax));
      const Point h{wx, wy, zz};
      const Point back = model.compose(model.inverse(h), g);
      const double w = std::exp(kernel.log_local(back, t1) + kernel.log_local(h, t2) - log_q) / direct;
      acc.sum += w;
      acc.sum_sq += w * w;
    }
    return acc;
  });
  Acc total;
  for (const Acc& a : blocks) {
    total.sum += a.sum;
    total.sum_sq += a.sum_sq;
  }
  const double mean = total.sum / static_cast<double>(n_samples);
  const double var = std::max(0.0, total.sum_sq / static_cast<double>(n_samples) - mean * mean);
  return {std::abs(mean - 1.0), 1.96 * std::sqrt(var / static_cast<double>(n_samples)), n_samples};
}

}  // namespace hypowiener
