#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>

namespace hypowiener {

/// Coordinates of a point of R^N, N <= 3. Small value type; no heap.
class Point {
 public:
  static constexpr std::size_t kMaxDim = 3;

  Point() = default;
  Point(std::initializer_list<double> coords);
  explicit Point(std::span<const double> coords);

  static Point zeros(std::size_t n);

  std::size_t size() const { return size_; }
  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }
  std::span<const double> coords() const { return {c_.data(), size_}; }

  bool is_finite() const;
  bool operator==(const Point& other) const;

 private:
  std::array<double, kMaxDim> c_{};
  std::size_t size_ = 0;
};

struct SpaceTimePoint {
  Point x;
  double t = 0.0;
};

enum class GroupKind { Euclidean, Heisenberg1 };

/// A Carnot group structure on R^N with its homogeneous gauge distance.
///
/// Euclidean(N): vector addition, isotropic dilations, |x - y|.
/// Heisenberg1: exponential coordinates (x, y, z) with
///   (x1,y1,z1) o (x2,y2,z2) = (x1+x2, y1+y2, z1+z2 + (x1 y2 - y1 x2)/2),
/// dilations (lx, ly, l^2 z), horizontal fields X = dx - (y/2) dz and
/// Y = dy + (x/2) dz, and the Koranyi gauge ((x^2+y^2)^2 + 16 z^2)^(1/4).
class GroupModel {
 public:
  static GroupModel euclidean(int n);
  static GroupModel heisenberg();
  // Accepts "euclidean1", "euclidean2", "euclidean3", "heisenberg"/"heisenberg1"/"h1".
  static GroupModel from_name(const std::string& name);

  GroupKind kind() const { return kind_; }
  std::string name() const;
  int topological_dimension() const { return n_; }
  int homogeneous_dimension() const { return q_; }
  /// |B(0,1)| for the gauge distance.
  double unit_ball_volume() const { return omega_; }

  Point identity() const { return Point::zeros(static_cast<std::size_t>(n_)); }
  Point compose(const Point& g, const Point& h) const;
  Point inverse(const Point& g) const;
  Point dilate(double lambda, const Point& g) const;
  /// Homogeneous norm |g|, i.e. distance(identity, g).
  double gauge(const Point& g) const;
  double distance(const Point& x, const Point& y) const;
  /// |B(x, r)| = omega r^Q; independent of the center.
  double ball_volume(double r) const;
  /// Parabolic dilation (D_l x, l^2 t).
  SpaceTimePoint dilate(double lambda, const SpaceTimePoint& z) const;
  /// (d(x,xi)^4 + (t - tau)^2)^(1/4).
  double parabolic_distance(const SpaceTimePoint& z, const SpaceTimePoint& zeta) const;

  /// Left-translated coordinates of z relative to a base point z0:
  /// g = x0^{-1} o x and depth s = t0 - t.
  Point local_offset(const Point& x0, const Point& x) const { return compose(inverse(x0), x); }

  void check_point(const Point& g) const;

  bool operator==(const GroupModel& other) const { return kind_ == other.kind_ && n_ == other.n_; }

 private:
  GroupModel(GroupKind kind, int n, int q, double omega) : kind_(kind), n_(n), q_(q), omega_(omega) {}

  GroupKind kind_;
  int n_;
  int q_;
  double omega_;
};

}  // namespace hypowiener
