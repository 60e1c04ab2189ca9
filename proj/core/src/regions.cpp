#include "hypowiener/regions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hypowiener/error.hpp"
#include "hypowiener/random.hpp"
#include "json.hpp"

namespace hypowiener {

namespace {

constexpr int kSchema = 1;

const std::pair<DomainVariant, const char*> kNames[] = {
    {DomainVariant::LogLogParaboloidInterior, "LogLogParaboloidInterior"},
    {DomainVariant::LogLogParaboloidExteriorCondition, "LogLogParaboloidExteriorCondition"},
    {DomainVariant::ParabolicConeExterior, "ParabolicConeExterior"},
    {DomainVariant::CylinderLateral, "CylinderLateral"},
    {DomainVariant::PuncturedSlab, "PuncturedSlab"},
    {DomainVariant::HalfSpaceComplement, "HalfSpaceComplement"},
    {DomainVariant::CustomImplicit, "CustomImplicit"},
};

double loglog_window_interior(double r0) { return std::min(r0 * r0, 0.5 / std::numbers::e); }
double loglog_window_exterior(double r0) { return std::min(r0 * r0, 1.0 / std::numbers::e); }

bool in_loglog_exterior(double d2, double s, double C, double window) {
  if (!(s >= 0.0 && s < window)) return false;
  if (s == 0.0) return true;
  return d2 >= C * s * loglog_inv(s);
}

}  // namespace

double loglog_inv(double s) {
  require(s > 0.0 && s < 1.0, "loglog(1/s) needs 0 < s < 1");
  return std::log(std::log(1.0 / s));
}

std::string variant_name(DomainVariant v) {
  for (const auto& [k, n] : kNames)
    if (k == v) return n;
  return "unknown";
}

DomainVariant variant_from_name(const std::string& name) {
  for (const auto& [k, n] : kNames)
    if (name == n) return k;
  throw ConfigError("unknown domain variant: " + name);
}

bool LocalBox::contains(const Point& g, double s) const {
  if (!(s < depth && s > -above)) return false;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!(std::abs(g[i]) < half_width[i])) return false;
  return true;
}

Domain::Domain(GroupModel model, SpaceTimePoint z0, DomainVariant v, LocalBox box)
    : model_(model), z0_(z0), variant_(v), box_(std::move(box)) {
  model_.check_point(z0_.x);
  require(box_.half_width.size() == static_cast<std::size_t>(model_.topological_dimension()),
          "box dimension does not match the model");
  for (double h : box_.half_width) require(h > 0.0 && std::isfinite(h), "box half-widths must be positive and finite");
  require(box_.depth > 0.0 && std::isfinite(box_.depth) && box_.above >= 0.0 && std::isfinite(box_.above),
          "box depth must be positive and finite");
}

LocalBox Domain::default_box(const GroupModel& model, double half, double depth, double above) {
  LocalBox b;
  b.half_width.assign(static_cast<std::size_t>(model.topological_dimension()), half);
  if (model.kind() == GroupKind::Heisenberg1) b.half_width[2] = half * half;
  b.depth = depth;
  b.above = above;
  return b;
}

Domain Domain::loglog_interior(GroupModel model, SpaceTimePoint z0, double C, double r0, LocalBox box) {
  require(C > 0.0 && r0 > 0.0, "log-log paraboloid needs C > 0 and r0 > 0");
  Domain d(model, z0, DomainVariant::LogLogParaboloidInterior, std::move(box));
  d.a_ = C;
  d.b_ = r0;
  return d;
}

Domain Domain::loglog_exterior(GroupModel model, SpaceTimePoint z0, double C, double r0, LocalBox box) {
  require(C > 0.0 && r0 > 0.0, "log-log exterior condition needs C > 0 and r0 > 0");
  Domain d(model, z0, DomainVariant::LogLogParaboloidExteriorCondition, std::move(box));
  d.a_ = C;
  d.b_ = r0;
  return d;
}

Domain Domain::cone_exterior(GroupModel model, SpaceTimePoint z0, double M, double r0, LocalBox box) {
  require(M > 0.0 && r0 > 0.0, "parabolic cone needs M > 0 and r0 > 0");
  Domain d(model, z0, DomainVariant::ParabolicConeExterior, std::move(box));
  d.a_ = M;
  d.b_ = r0;
  return d;
}

Domain Domain::cylinder_lateral(GroupModel model, SpaceTimePoint z0, double R, double depth, LocalBox box) {
  require(R > 0.0 && depth > 0.0, "cylinder needs R > 0 and depth > 0");
  Domain d(model, z0, DomainVariant::CylinderLateral, std::move(box));
  d.a_ = R;
  d.b_ = depth;
  return d;
}

Domain Domain::punctured_slab(GroupModel model, SpaceTimePoint z0, LocalBox box) {
  return Domain(model, z0, DomainVariant::PuncturedSlab, std::move(box));
}

Domain Domain::half_space_complement(GroupModel model, SpaceTimePoint z0, LocalBox box) {
  return Domain(model, z0, DomainVariant::HalfSpaceComplement, std::move(box));
}

Domain Domain::custom(GroupModel model, SpaceTimePoint z0, LocalPredicate inside, LocalBox box) {
  require(static_cast<bool>(inside), "custom domain needs a predicate");
  Domain d(model, z0, DomainVariant::CustomImplicit, std::move(box));
  d.custom_ = std::move(inside);
  return d;
}

Domain Domain::custom_complement_box(GroupModel model, SpaceTimePoint z0, ComplementBox cb, LocalBox box) {
  const auto n = static_cast<std::size_t>(model.topological_dimension());
  require(cb.lo.size() == n && cb.hi.size() == n, "complement box dimension does not match the model");
  for (std::size_t i = 0; i < n; ++i) require(cb.lo[i] <= cb.hi[i], "complement box needs lo <= hi");
  require(cb.s_lo <= cb.s_hi, "complement box needs s_lo <= s_hi");
  Domain d = custom(
      model, z0,
      [cb](const Point& g, double s) {
        if (s < cb.s_lo || s > cb.s_hi) return true;
        for (std::size_t i = 0; i < g.size(); ++i)
          if (g[i] < cb.lo[i] || g[i] > cb.hi[i]) return true;
        return false;
      },
      std::move(box));
  d.complement_box_ = std::move(cb);
  return d;
}

double Domain::param(const std::string& key) const {
  switch (variant_) {
    case DomainVariant::LogLogParaboloidInterior:
    case DomainVariant::LogLogParaboloidExteriorCondition:
      if (key == "C") return a_;
      if (key == "r0") return b_;
      break;
    case DomainVariant::ParabolicConeExterior:
      if (key == "M") return a_;
      if (key == "r0") return b_;
      break;
    case DomainVariant::CylinderLateral:
      if (key == "R") return a_;
      if (key == "depth") return b_;
      break;
    default:
      break;
  }
  throw ConfigError("domain " + variant_name(variant_) + " has no parameter " + key);
}

bool Domain::local_contains(const Point& g, double s) const {
  if (s == 0.0 && g == model_.identity()) return false;
  if (!box_.contains(g, s)) return false;
  const double d = model_.gauge(g);
  const double d2 = d * d;
  switch (variant_) {
    case DomainVariant::LogLogParaboloidInterior: {
      const double w = loglog_window_interior(b_);
      return s > 0.0 && s < w && d2 < a_ * s * loglog_inv(s);
    }
    case DomainVariant::LogLogParaboloidExteriorCondition:
      return !in_loglog_exterior(d2, s, a_, loglog_window_exterior(b_));
    case DomainVariant::ParabolicConeExterior:
      return !(s >= 0.0 && s < b_ * b_ && d2 >= a_ * s);
    case DomainVariant::CylinderLateral: {
      if (!(s < b_)) return false;
      Point c = model_.identity();
      c[0] = -a_;
      return model_.distance(g, c) < a_;
    }
    case DomainVariant::PuncturedSlab:
      return true;
    case DomainVariant::HalfSpaceComplement:
      return g[0] < 0.0;
    case DomainVariant::CustomImplicit:
      return custom_(g, s);
  }
  return false;
}

bool Domain::contains(const SpaceTimePoint& z) const {
  return local_contains(model_.local_offset(z0_.x, z.x), z0_.t - z.t);
}

double Domain::scale() const {
  double r = std::min(std::sqrt(box_.depth), box_.above > 0.0 ? std::sqrt(box_.above) : box_.depth);
  for (std::size_t i = 0; i < box_.half_width.size(); ++i) {
    const bool center = model_.kind() == GroupKind::Heisenberg1 && i == 2;
    r = std::min(r, center ? 2.0 * std::sqrt(box_.half_width[i]) : box_.half_width[i]);
  }
  return r;
}

std::optional<ExteriorLogLog> Domain::declared_loglog() const {
  if (variant_ == DomainVariant::LogLogParaboloidExteriorCondition) return ExteriorLogLog{a_, b_};
  return std::nullopt;
}

std::optional<ExteriorCone> Domain::declared_cone() const {
  if (variant_ == DomainVariant::ParabolicConeExterior) return ExteriorCone{a_, b_};
  return std::nullopt;
}

std::string Domain::to_json() const {
  nlohmann::json params = nlohmann::json::object();
  switch (variant_) {
    case DomainVariant::LogLogParaboloidInterior:
    case DomainVariant::LogLogParaboloidExteriorCondition:
      params = {{"C", a_}, {"r0", b_}};
      break;
    case DomainVariant::ParabolicConeExterior:
      params = {{"M", a_}, {"r0", b_}};
      break;
    case DomainVariant::CylinderLateral:
      params = {{"R", a_}, {"depth", b_}};
      break;
    case DomainVariant::CustomImplicit:
      if (complement_box_) {
        params["complement_box"] = {{"lo", complement_box_->lo},
                                    {"hi", complement_box_->hi},
                                    {"s_lo", complement_box_->s_lo},
                                    {"s_hi", complement_box_->s_hi}};
      } else {
        params["predicate"] = "opaque";
      }
      break;
    default:
      break;
  }
  std::vector<double> x0(z0_.x.coords().begin(), z0_.x.coords().end());
  nlohmann::json j{{"schema", kSchema},
                   {"model", model_.name()},
                   {"variant", variant_name(variant_)},
                   {"params", params},
                   {"z0", {{"x", x0}, {"t", z0_.t}}},
                   {"box", {{"half_width", box_.half_width}, {"depth", box_.depth}, {"above", box_.above}}}};
  return j.dump(2);
}

Domain Domain::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("domain: invalid JSON");
  try {
    if (j.value("schema", kSchema) != kSchema) throw ConfigError("domain: unsupported schema version");
    const GroupModel model = GroupModel::from_name(j.at("model").get<std::string>());
    const DomainVariant v = variant_from_name(j.at("variant").get<std::string>());
    const auto xs = j.at("z0").at("x").get<std::vector<double>>();
    require(xs.size() == static_cast<std::size_t>(model.topological_dimension()), "domain: z0 dimension mismatch");
    const SpaceTimePoint z0{Point(std::span<const double>(xs)), j.at("z0").at("t").get<double>()};
    LocalBox box;
    const auto& jb = j.at("box");
    box.half_width = jb.at("half_width").get<std::vector<double>>();
    box.depth = jb.at("depth").get<double>();
    box.above = jb.value("above", box.depth);
    const auto& p = j.value("params", nlohmann::json::object());
    switch (v) {
      case DomainVariant::LogLogParaboloidInterior:
        return loglog_interior(model, z0, p.at("C").get<double>(), p.at("r0").get<double>(), box);
      case DomainVariant::LogLogParaboloidExteriorCondition:
        return loglog_exterior(model, z0, p.at("C").get<double>(), p.at("r0").get<double>(), box);
      case DomainVariant::ParabolicConeExterior:
        return cone_exterior(model, z0, p.at("M").get<double>(), p.at("r0").get<double>(), box);
      case DomainVariant::CylinderLateral:
        return cylinder_lateral(model, z0, p.at("R").get<double>(), p.at("depth").get<double>(), box);
      case DomainVariant::PuncturedSlab:
        return punctured_slab(model, z0, box);
      case DomainVariant::HalfSpaceComplement:
        return half_space_complement(model, z0, box);
      case DomainVariant::CustomImplicit: {
        if (!p.contains("complement_box")) throw ConfigError("domain: CustomImplicit needs params.complement_box");
        const auto& c = p.at("complement_box");
        ComplementBox cb{c.at("lo").get<std::vector<double>>(), c.at("hi").get<std::vector<double>>(),
                         c.at("s_lo").get<double>(), c.at("s_hi").get<double>()};
        return custom_complement_box(model, z0, cb, box);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
  throw ConfigError("domain: unhandled variant");
}

Domain Domain::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read domain file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::uint64_t Domain::hash() const { return hash_string(to_json()); }

std::string ValidationReport::to_json() const {
  return nlohmann::json{{"ok", ok},
                        {"violations", violations},
                        {"interior_fraction", interior_fraction},
                        {"samples", samples}}
      .dump(2);
}

ValidationReport validate(const Domain& domain, std::size_t samples, std::uint64_t seed) {
  ValidationReport rep;
  rep.samples = samples;
  const GroupModel& model = domain.model();
  const LocalBox& box = domain.box();
  const std::size_t n = box.half_width.size();
  CounterRng rng(seed, 0);

  auto random_in_box = [&](Point& g, double& s) {
    g = model.identity();
    for (std::size_t i = 0; i < n; ++i) g[i] = box.half_width[i] * (2.0 * rng.uniform() - 1.0);
    s = -box.above + (box.depth + box.above) * rng.uniform();
  };

  // Openness proxy: inside points stay inside under tiny perturbations.
  std::size_t inside = 0, fragile = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    Point g;
    double s;
    random_in_box(g, s);
    if (!domain.local_contains(g, s)) continue;
    ++inside;
    Point h = g;
    for (std::size_t i = 0; i < n; ++i) h[i] += 1e-10 * (2.0 * rng.uniform() - 1.0);
    if (!domain.local_contains(h, s + 1e-10 * (2.0 * rng.uniform() - 1.0))) ++fragile;
  }
  rep.interior_fraction = samples ? static_cast<double>(inside) / static_cast<double>(samples) : 0.0;
  if (inside == 0) rep.violations.push_back("no interior point found in the box");
  if (fragile * 1000 > std::max<std::size_t>(inside, 1))
    rep.violations.push_back("interior points are not stable under perturbation (openness proxy)");

  // z0 on the boundary: not inside, with interior points in every small parabolic ball.
  if (domain.local_contains(model.identity(), 0.0)) rep.violations.push_back("z0 lies inside the domain");
  const double scale = domain.scale();
  for (int level = 1; level <= 6; ++level) {
    const double eps = scale * std::pow(0.25, level);
    bool found = false;
    for (std::size_t k = 0; k < std::max<std::size_t>(samples / 10, 200) && !found; ++k) {
      Point u = model.identity();
      for (std::size_t i = 0; i < n; ++i) u[i] = 2.0 * rng.uniform() - 1.0;
      if (model.kind() == GroupKind::Heisenberg1) u[2] *= 0.25;
      const double s = eps * eps * (2.0 * rng.uniform() - 1.0);
      found = domain.local_contains(model.dilate(eps, u), s);
    }
    if (!found) {
      rep.violations.push_back("no interior point within parabolic distance " + std::to_string(eps) + " of z0");
      break;
    }
  }

  // Declared exterior conditions must lie in the complement.
  auto check_exterior = [&](const char* what, auto&& threshold, double window) {
    std::size_t bad = 0;
    for (std::size_t k = 0; k < samples; ++k) {
      const double s = window * rng.uniform();
      Point u = model.identity();
      for (std::size_t i = 0; i < n; ++i) u[i] = 2.0 * rng.uniform() - 1.0;
      const double du = model.gauge(u);
      if (!(du > 0.0)) continue;
      const double rmin = std::sqrt(threshold(s));
      const double r = rmin * (1.0 + 3.0 * rng.uniform());
      if (domain.local_contains(model.dilate(r / du, u), s)) ++bad;
    }
    if (bad > 0) rep.violations.push_back(std::string(what) + " violated at " + std::to_string(bad) + " samples");
  };
  if (auto ll = domain.declared_loglog()) {
    const double w = std::min(ll->r0 * ll->r0, 1.0 / std::numbers::e);
    check_exterior("exterior log-log condition", [&](double s) { return ll->C * s * loglog_inv(s); }, w);
  }
  if (auto cone = domain.declared_cone()) {
    check_exterior("exterior cone condition", [&](double s) { return cone->M * s; }, cone->r0 * cone->r0);
  }
  rep.ok = rep.violations.empty();
  return rep;
}

}  // namespace hypowiener
