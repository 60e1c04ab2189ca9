#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hypowiener/carnot.hpp"

namespace hypowiener {

enum class DomainVariant {
  LogLogParaboloidInterior,
  LogLogParaboloidExteriorCondition,
  ParabolicConeExterior,
  CylinderLateral,
  PuncturedSlab,
  HalfSpaceComplement,
  CustomImplicit,
};

std::string variant_name(DomainVariant v);
DomainVariant variant_from_name(const std::string& name);

/// Space-time box in coordinates local to z0: |g_i| < half_width[i] and
/// -above < s < depth, where g = x0^{-1} o x and s = t0 - t.
struct LocalBox {
  std::vector<double> half_width;
  double depth = 1.0;
  double above = 1.0;

  bool contains(const Point& g, double s) const;
};

/// Axis-aligned local box used as the complement of a CustomImplicit domain
/// loaded from JSON (closed set).
struct ComplementBox {
  std::vector<double> lo, hi;
  double s_lo = 0.0, s_hi = 0.0;
};

/// Exterior condition {d^2 >= C s loglog(1/s), 0 < s < min(r0^2, 1/e)} or
/// {d^2 >= M s, 0 < s < r0^2} contained in the complement.
struct ExteriorLogLog {
  double C = 0.0;
  double r0 = 0.0;
};
struct ExteriorCone {
  double M = 0.0;
  double r0 = 0.0;
};

/// A bounded space-time domain with a distinguished boundary point z0.
/// Every variant is intersected with the local box.
class Domain {
 public:
  using LocalPredicate = std::function<bool(const Point& g, double s)>;

  static Domain loglog_interior(GroupModel model, SpaceTimePoint z0, double C, double r0, LocalBox box);
  static Domain loglog_exterior(GroupModel model, SpaceTimePoint z0, double C, double r0, LocalBox box);
  static Domain cone_exterior(GroupModel model, SpaceTimePoint z0, double M, double r0, LocalBox box);
  static Domain cylinder_lateral(GroupModel model, SpaceTimePoint z0, double R, double depth, LocalBox box);
  static Domain punctured_slab(GroupModel model, SpaceTimePoint z0, LocalBox box);
  static Domain half_space_complement(GroupModel model, SpaceTimePoint z0, LocalBox box);
  /// inside(g, s) describes Omega before intersection with the box.
  static Domain custom(GroupModel model, SpaceTimePoint z0, LocalPredicate inside, LocalBox box);
  static Domain custom_complement_box(GroupModel model, SpaceTimePoint z0, ComplementBox complement, LocalBox box);

  /// Box with half-width `half` (squared on the H^1 center), depth `depth`, height `above`.
  static LocalBox default_box(const GroupModel& model, double half, double depth, double above);

  const GroupModel& model() const { return model_; }
  const SpaceTimePoint& z0() const { return z0_; }
  DomainVariant variant() const { return variant_; }
  const LocalBox& box() const { return box_; }
  double param(const std::string& key) const;

  bool contains(const SpaceTimePoint& z) const;
  bool complement_contains(const SpaceTimePoint& z) const { return !contains(z); }
  bool local_contains(const Point& g, double s) const;
  bool local_complement(const Point& g, double s) const { return !local_contains(g, s); }

  /// Parabolic distance from z0 to the box boundary.
  double scale() const;

  std::optional<ExteriorLogLog> declared_loglog() const;
  std::optional<ExteriorCone> declared_cone() const;

  std::string to_json() const;
  static Domain from_json(const std::string& text);
  static Domain load(const std::string& path);
  std::uint64_t hash() const;

 private:
  Domain(GroupModel model, SpaceTimePoint z0, DomainVariant v, LocalBox box);

  GroupModel model_;
  SpaceTimePoint z0_;
  DomainVariant variant_;
  LocalBox box_;
  double a_ = 0.0, b_ = 0.0;  // (C, r0), (M, r0), (R, depth)
  LocalPredicate custom_;
  std::optional<ComplementBox> complement_box_;
};

/// loglog(1/s), defined for 0 < s < 1/e.
double loglog_inv(double s);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
  double interior_fraction = 0.0;
  std::size_t samples = 0;
  std::string to_json() const;
};

/// Sampled checks: openness proxy, boundedness, z0 on the boundary, and the
/// declared exterior conditions.
ValidationReport validate(const Domain& domain, std::size_t samples, std::uint64_t seed);

}  // namespace hypowiener
