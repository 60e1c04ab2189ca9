#include "hypowiener/meanvalue.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "hypowiener/error.hpp"
#include "hypowiener/random.hpp"

namespace hypowiener {

namespace {

using boost::math::quadrature::gauss_kronrod;

// Integrand weight as a function of the offset y = xi - x and the lag s.
using SliceFn = std::function<double(const Point& y, double s)>;

// int over |y| < R in R^n of f(y) dy, n = 1, 2, 3.
double ball_integral(int n, double R, const std::function<double(const Point&)>& f, double tol) {
  constexpr unsigned depth = 8;
  const double pi = std::numbers::pi;
  if (n == 1) {
    return gauss_kronrod<double, 15>::integrate([&](double v) { return f(Point{R * v}); }, -1.0, 1.0, depth, tol) * R;
  }
  if (n == 2) {
    auto radial = [&](double rho) {
      auto ang = [&](double th) { return f(Point{R * rho * std::cos(th), R * rho * std::sin(th)}); };
      return rho * gauss_kronrod<double, 15>::integrate(ang, 0.0, 2.0 * pi, depth, tol);
    };
    return R * R * gauss_kronrod<double, 15>::integrate(radial, 0.0, 1.0, depth, tol);
  }
  auto radial = [&](double rho) {
    auto polar = [&](double th) {
      auto azim = [&](double ph) {
        const double st = std::sin(th);
        return f(Point{R * rho * st * std::cos(ph), R * rho * st * std::sin(ph), R * rho * std::cos(th)});
      };
      return std::sin(th) * gauss_kronrod<double, 15>::integrate(azim, 0.0, 2.0 * pi, depth, tol);
    };
    return rho * rho * gauss_kronrod<double, 15>::integrate(polar, 0.0, pi, depth, tol);
  };
  return R * R * R * gauss_kronrod<double, 15>::integrate(radial, 0.0, 1.0, depth, tol);
}

// (1/r) int_0^S ds int_{|y| < R(s)} f(y, s) dy for Euclidean(N), where
// S = r^{2/N} / (4 pi) and R(s)^2 = 2 N s log(S / s).
IntegralEstimate euclidean_heat_ball_integral(int n, double r, const SliceFn& f, double tol) {
  const double S = std::pow(r, 2.0 / n) / (4.0 * std::numbers::pi);
  auto outer = [&](double s) {
    // Slices thinner than 1e-60 S carry O(1e-30) of the mass; skipping them avoids s^2 underflow.
    if (!(s > 1e-60 * S) || !(s < S)) return 0.0;
    const double R2 = 2.0 * n * s * std::log(S / s);
    if (!(R2 > 0.0)) return 0.0;
    return ball_integral(n, std::sqrt(R2), [&](const Point& y) { return f(y, s); }, tol);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  double err = 0.0, l1 = 0.0;
  const double value = ts.integrate(outer, 0.0, S, std::sqrt(tol), &err, &l1);
  return {value / r, std::abs(err) / r, 0};
}

// Monte Carlo over P(z, r) in self-similar coordinates: s = S w^2 with w
// uniform, and the normalized offset uniform in a gauge box whose size
// follows the Gaussian upper bound at that lag.
IntegralEstimate mc_heat_ball_integral(const HeatKernel& kernel, const SpaceTimePoint& z, double r,
                                       const BoundConstants& c, const SliceFn& f, const IntegrationBudget& budget) {
  const GroupModel& model = kernel.model();
  const double Q = model.homogeneous_dimension();
  const double omega = model.unit_ball_volume();
  const double K = c.lambda * r / omega;
  const double S = std::pow(K, 2.0 / Q);
  const int n = model.topological_dimension();
  const bool heis = model.kind() == GroupKind::Heisenberg1;
  const std::size_t N = budget.mc_samples;
  require(N >= 2, "Monte Carlo mean value needs at least two samples");
  struct Acc {
    double sum = 0.0, sum_sq = 0.0;
  };
  const auto blocks = map_blocks<Acc>(N, 4096, [&](std::size_t, std::size_t begin, std::size_t end) {
    Acc acc;
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(budget.seed, i);
      const double w = rng.uniform();
      const double s = S * w * w;
      const double rho = std::sqrt(std::max(0.0, std::log(K / std::pow(s, 0.5 * Q)) / c.a0));
      Point gn = Point::zeros(static_cast<std::size_t>(n));
      double box = 1.0;
      for (int k = 0; k < n; ++k) {
        const double half = (heis && k == 2) ? 0.25 * rho * rho : rho;
        gn[k] = half * (2.0 * rng.uniform() - 1.0);
        box *= 2.0 * half;
      }
      const Point y = model.dilate(std::sqrt(s), gn);
      const SpaceTimePoint zeta{model.compose(z.x, y), z.t - s};
      double v = 0.0;
      if (kernel.log_gamma(z, zeta) > -std::log(r)) v = f(y, s) * box * std::pow(s, 0.5 * Q) * 2.0 * S * w;
      acc.sum += v;
      acc.sum_sq += v * v;
    }
    return acc;
  });
  Acc t;
  for (const Acc& a : blocks) {
    t.sum += a.sum;
    t.sum_sq += a.sum_sq;
  }
  const double mean = t.sum / static_cast<double>(N);
  const double var = std::max(0.0, t.sum_sq / static_cast<double>(N) - mean * mean);
  return {mean / r, 1.96 * std::sqrt(var / static_cast<double>(N)) / r, N};
}

}  // namespace

bool HeatBallBox::contains(const GroupModel& model, const SpaceTimePoint& zeta) const {
  const double s = center.t - zeta.t;
  return s > 0.0 && s <= depth && model.distance(center.x, zeta.x) <= radius;
}

HeatBallBox heat_ball_bounds(const GroupModel& model, const SpaceTimePoint& z, double r, const BoundConstants& c) {
  require(r > 0.0, "heat ball radius must be positive");
  const double Q = model.homogeneous_dimension();
  // Lambda exp(-a0 d^2/s) / (omega s^{Q/2}) > 1/r.
  const double K = c.lambda * r / model.unit_ball_volume();
  HeatBallBox box;
  box.center = z;
  box.r = r;
  box.depth = std::pow(K, 2.0 / Q);
  // max_s (s/a0) log(K / s^{Q/2}) is reached at s = K^{2/Q}/e.
  box.radius = std::sqrt(Q * box.depth / (2.0 * std::numbers::e * c.a0));
  return box;
}

bool heat_ball_contains(const HeatKernel& kernel, const SpaceTimePoint& z, double r, const SpaceTimePoint& zeta) {
  return kernel.log_gamma(z, zeta) > -std::log(r);
}

double mean_value_weight(const HeatKernel& kernel, const SpaceTimePoint& z, double r, const SpaceTimePoint& zeta) {
  const GroupModel& model = kernel.model();
  const double s = z.t - zeta.t;
  if (!(s > 0.0)) return 0.0;
  if (model.kind() == GroupKind::Euclidean) {
    const double d = model.distance(z.x, zeta.x);
    return d * d / (4.0 * s * s * r);
  }
  const double h = std::max(1e-5, 1e-3 * model.distance(z.x, zeta.x));
  auto f = [&](const Point& xi) { return kernel.log_local(model.local_offset(xi, z.x), s); };
  const double fx = (f(model.compose(zeta.x, Point{h, 0, 0})) - f(model.compose(zeta.x, Point{-h, 0, 0}))) / (2 * h);
  const double fy = (f(model.compose(zeta.x, Point{0, h, 0})) - f(model.compose(zeta.x, Point{0, -h, 0}))) / (2 * h);
  return (fx * fx + fy * fy) / r;
}

IntegralEstimate mean_value_M(const HeatKernel& kernel, const SpaceTimeFunction& u, const SpaceTimePoint& z,
                              double r, const BoundConstants& constants, const IntegrationBudget& budget) {
  require(r > 0.0, "heat ball radius must be positive");
  const GroupModel& model = kernel.model();
  model.check_point(z.x);
  if (model.kind() == GroupKind::Euclidean) {
    const int n = model.topological_dimension();
    auto f = [&](const Point& y, double s) {
      double y2 = 0.0;
      for (double c : y.coords()) y2 += c * c;
      return y2 / (4.0 * s * s) * u({model.compose(z.x, y), z.t - s});
    };
    return euclidean_heat_ball_integral(n, r, f, budget.tolerance);
  }
  auto f = [&](const Point& y, double s) {
    const SpaceTimePoint zeta{model.compose(z.x, y), z.t - s};
    return r * mean_value_weight(kernel, z, r, zeta) * u(zeta);
  };
  return mc_heat_ball_integral(kernel, z, r, constants, f, budget);
}

IntegralEstimate mean_value_remainder(const HeatKernel& kernel, const SpaceTimeFunction& Hu, const SpaceTimePoint& z,
                                      double r, const BoundConstants& constants, const IntegrationBudget& budget) {
  require(r > 0.0, "heat ball radius must be positive");
  const GroupModel& model = kernel.model();
  model.check_point(z.x);
  auto f = [&](const Point& y, double s) {
    const SpaceTimePoint zeta{model.compose(z.x, y), z.t - s};
    const double lg = std::log(r) + kernel.log_local(y, s);
    if (!(lg > 0.0)) return 0.0;
    return (std::expm1(lg) - lg) * Hu(zeta);
  };
  if (model.kind() == GroupKind::Euclidean)
    return euclidean_heat_ball_integral(model.topological_dimension(), r, f, budget.tolerance);
  return mc_heat_ball_integral(kernel, z, r, constants, f, budget);
}

}  // namespace hypowiener
