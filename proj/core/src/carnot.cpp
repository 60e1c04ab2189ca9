#include "hypowiener/carnot.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hypowiener/error.hpp"

namespace hypowiener {

Point::Point(std::initializer_list<double> coords) {
  require(coords.size() >= 1 && coords.size() <= kMaxDim, "point dimension must be 1..3");
  std::copy(coords.begin(), coords.end(), c_.begin());
  size_ = coords.size();
}

Point::Point(std::span<const double> coords) {
  require(coords.size() >= 1 && coords.size() <= kMaxDim, "point dimension must be 1..3");
  std::copy(coords.begin(), coords.end(), c_.begin());
  size_ = coords.size();
}

Point Point::zeros(std::size_t n) {
  require(n >= 1 && n <= kMaxDim, "point dimension must be 1..3");
  Point p;
  p.size_ = n;
  return p;
}

bool Point::is_finite() const {
  return std::all_of(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(size_),
                     [](double v) { return std::isfinite(v); });
}

bool Point::operator==(const Point& other) const {
  if (size_ != other.size_) return false;
  for (std::size_t i = 0; i < size_; ++i)
    if (c_[i] != other.c_[i]) return false;
  return true;
}

GroupModel GroupModel::euclidean(int n) {
  require(n >= 1 && n <= 3, "Euclidean model supports N = 1, 2, 3");
  const double half = 0.5 * n;
  const double omega = std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
  return GroupModel(GroupKind::Euclidean, n, n, omega);
}

GroupModel GroupModel::heisenberg() {
  // |{((x^2+y^2)^2 + 16 z^2) < 1}| = pi * int_0^1 r sqrt(1 - r^4) dr = pi^2 / 8.
  return GroupModel(GroupKind::Heisenberg1, 3, 4, std::numbers::pi * std::numbers::pi / 8.0);
}

GroupModel GroupModel::from_name(const std::string& name) {
  if (name == "euclidean1") return euclidean(1);
  if (name == "euclidean2") return euclidean(2);
  if (name == "euclidean3") return euclidean(3);
  if (name == "heisenberg" || name == "heisenberg1" || name == "h1") return heisenberg();
  throw ConfigError("unknown group model '" + name + "'");
}

std::string GroupModel::name() const {
  if (kind_ == GroupKind::Heisenberg1) return "heisenberg";
  return "euclidean" + std::to_string(n_);
}

void GroupModel::check_point(const Point& g) const {
  if (static_cast<int>(g.size()) != n_)
    throw ConfigError("dimension mismatch: point has " + std::to_string(g.size()) +
                      " coordinates, model " + name() + " expects " + std::to_string(n_));
}

Point GroupModel::compose(const Point& g, const Point& h) const {
  check_point(g);
  check_point(h);
  Point r = Point::zeros(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) r[i] = g[i] + h[i];
  if (kind_ == GroupKind::Heisenberg1) r[2] += 0.5 * (g[0] * h[1] - g[1] * h[0]);
  return r;
}

Point GroupModel::inverse(const Point& g) const {
  check_point(g);
  Point r = Point::zeros(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) r[i] = -g[i];
  return r;
}

Point GroupModel::dilate(double lambda, const Point& g) const {
  require(lambda > 0.0, "dilation factor must be positive");
  check_point(g);
  Point r = Point::zeros(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) r[i] = lambda * g[i];
  if (kind_ == GroupKind::Heisenberg1) r[2] = lambda * lambda * g[2];
  return r;
}

double GroupModel::gauge(const Point& g) const {
  check_point(g);
  if (kind_ == GroupKind::Heisenberg1) {
    const double h2 = g[0] * g[0] + g[1] * g[1];
    return std::sqrt(std::sqrt(h2 * h2 + 16.0 * g[2] * g[2]));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * g[i];
  return std::sqrt(s);
}

double GroupModel::distance(const Point& x, const Point& y) const {
  return gauge(compose(inverse(y), x));
}

double GroupModel::ball_volume(double r) const {
  require(r > 0.0, "ball radius must be positive");
  return omega_ * std::pow(r, q_);
}

SpaceTimePoint GroupModel::dilate(double lambda, const SpaceTimePoint& z) const {
  return {dilate(lambda, z.x), lambda * lambda * z.t};
}

double GroupModel::parabolic_distance(const SpaceTimePoint& z, const SpaceTimePoint& zeta) const {
  const double d = distance(z.x, zeta.x);
  const double dt = z.t - zeta.t;
  return std::sqrt(std::sqrt(d * d * d * d + dt * dt));
}

}  // namespace hypowiener
