#include "hypowiener/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "hypowiener/error.hpp"
#include "json.hpp"

namespace hypowiener {

namespace {

constexpr std::size_t kBlock = 256;

double step_length(const SimConfig& cfg, double t_origin, double t) {
  if (cfg.dt_relative <= 0.0) return cfg.dt;
  return std::clamp(cfg.dt_relative * (t_origin - t), cfg.dt_min, cfg.dt);
}

SpaceTimePoint lerp(const SpaceTimePoint& a, const SpaceTimePoint& b, double f) {
  SpaceTimePoint z = a;
  for (std::size_t i = 0; i < a.x.size(); ++i) z.x[i] = a.x[i] + f * (b.x[i] - a.x[i]);
  z.t = a.t + f * (b.t - a.t);
  return z;
}

}  // namespace

void SimConfig::check() const {
  require(dt > 0.0, "dt must be positive");
  require(n_paths >= 1, "n_paths must be >= 1");
  require(substeps >= 1, "substeps must be >= 1");
  require(dt_relative >= 0.0 && dt_min > 0.0, "relative step settings must be nonnegative");
}

std::string SimConfig::to_json() const {
  nlohmann::json j{{"dt", dt},           {"n_paths", n_paths},   {"seed", seed},
                   {"max_steps", max_steps}, {"dt_relative", dt_relative}, {"dt_min", dt_min},
                   {"substeps", substeps}};
  j["t_floor"] = std::isfinite(t_floor) ? nlohmann::json(t_floor) : nlohmann::json(nullptr);
  j["t_origin"] = t_origin ? nlohmann::json(*t_origin) : nlohmann::json(nullptr);
  return j.dump();
}

std::uint64_t SimConfig::hash() const { return hash_string(to_json()); }

SimConfig SimConfig::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("sim config: invalid JSON");
  SimConfig c;
  try {
    c.dt = j.value("dt", c.dt);
    c.n_paths = j.value("n_paths", c.n_paths);
    c.seed = j.value("seed", c.seed);
    c.max_steps = j.value("max_steps", c.max_steps);
    c.dt_relative = j.value("dt_relative", c.dt_relative);
    c.dt_min = j.value("dt_min", c.dt_min);
    c.substeps = j.value("substeps", c.substeps);
    if (j.contains("t_floor") && !j["t_floor"].is_null()) c.t_floor = j["t_floor"].get<double>();
    if (j.contains("t_origin") && !j["t_origin"].is_null()) c.t_origin = j["t_origin"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sim config: ") + e.what());
  }
  c.check();
  return c;
}

Point draw_increment(const GroupModel& model, double h, CounterRng& rng) {
  const int n = model.topological_dimension();
  const double sd = std::sqrt(2.0 * h);
  if (model.kind() == GroupKind::Euclidean) {
    Point d = model.identity();
    for (int i = 0; i < n; ++i) d[i] = sd * rng.normal();
    return d;
  }
  const double a = sd * rng.normal();
  const double b = sd * rng.normal();
  const double var = (h * h / 3.0) * (1.0 + (a * a + b * b) / (2.0 * h));
  return Point{a, b, std::sqrt(var) * rng.normal()};
}

WalkEnd walk_path(const GroupModel& model, const SpaceTimePoint& z_start, const SimConfig& cfg,
                  std::uint64_t path_index,
                  const std::function<bool(const SpaceTimePoint&, const SpaceTimePoint&)>& visit) {
  CounterRng rng(cfg.seed, path_index);
  const double origin = cfg.t_origin.value_or(z_start.t);
  SpaceTimePoint cur = z_start;
  for (std::size_t step = 0; step < cfg.max_steps; ++step) {
    if (cur.t < cfg.t_floor) return WalkEnd::Floor;
    const double h = step_length(cfg, origin, cur.t) / cfg.substeps;
    for (int j = 0; j < cfg.substeps; ++j) {
      SpaceTimePoint next{model.compose(cur.x, draw_increment(model, h, rng)), cur.t - h};
      if (visit(cur, next)) return WalkEnd::Stopped;
      cur = next;
    }
  }
  return cur.t < cfg.t_floor ? WalkEnd::Floor : WalkEnd::MaxSteps;
}

std::vector<SpaceTimePoint> sample_path(const GroupModel& model, const SpaceTimePoint& z_start, const SimConfig& cfg,
                                        std::uint64_t path_index) {
  cfg.check();
  model.check_point(z_start.x);
  std::vector<SpaceTimePoint> path{z_start};
  int sub = 0;
  walk_path(model, z_start, cfg, path_index, [&](const SpaceTimePoint&, const SpaceTimePoint& cur) {
    if (++sub == cfg.substeps) {
      path.push_back(cur);
      sub = 0;
    }
    return false;
  });
  return path;
}

HittingEstimate hitting_probability(const GroupModel& model, const SpaceTimePredicate& F,
                                    const SpaceTimePoint& z_start, double t_min, const SimConfig& cfg) {
  cfg.check();
  model.check_point(z_start.x);
  SimConfig c = cfg;
  c.t_floor = std::max(cfg.t_floor, t_min);
  const bool start_hit = F(z_start);
  const auto blocks = map_blocks<std::size_t>(c.n_paths, kBlock, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::size_t hits = 0;
    for (std::size_t i = begin; i < end; ++i) {
      if (start_hit) {
        ++hits;
        continue;
      }
      const WalkEnd r = walk_path(model, z_start, c, i, [&](const SpaceTimePoint&, const SpaceTimePoint& cur) {
        return cur.t >= t_min && F(cur);
      });
      if (r == WalkEnd::Stopped) ++hits;
    }
    return hits;
  });
  HittingEstimate est;
  est.n_paths = c.n_paths;
  est.seed = c.seed;
  for (std::size_t h : blocks) est.hits += h;
  const double n = static_cast<double>(est.n_paths);
  const double x = static_cast<double>(est.hits);
  const double z = 1.96;
  est.p_hat = x / n;
  const double centre = (x + 0.5 * z * z) / (n + z * z);
  est.ci_halfwidth = z / (n + z * z) * std::sqrt(x * (n - x) / n + 0.25 * z * z);
  est.ci_lo = std::max(0.0, centre - est.ci_halfwidth);
  est.ci_hi = std::min(1.0, centre + est.ci_halfwidth);
  return est;
}

PerronEstimate perron_estimate(const Domain& domain, const std::function<double(const SpaceTimePoint&)>& phi,
                               const SpaceTimePoint& z, const SimConfig& cfg, const std::string& datum) {
  cfg.check();
  require(domain.contains(z), "Perron start point must lie inside the domain");
  const GroupModel& model = domain.model();
  struct Acc {
    double sum = 0.0, sum_sq = 0.0;
    std::size_t used = 0, censored = 0;
  };
  const auto blocks = map_blocks<Acc>(cfg.n_paths, kBlock, [&](std::size_t, std::size_t begin, std::size_t end) {
    Acc acc;
    for (std::size_t i = begin; i < end; ++i) {
      SpaceTimePoint exit_point;
      const WalkEnd r = walk_path(model, z, cfg, i, [&](const SpaceTimePoint& prev, const SpaceTimePoint& cur) {
        if (domain.contains(cur)) return false;
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 30; ++it) {
          const double mid = 0.5 * (lo + hi);
          (domain.contains(lerp(prev, cur, mid)) ? lo : hi) = mid;
        }
        exit_point = lerp(prev, cur, hi);
        return true;
      });
      if (r != WalkEnd::Stopped) {
        ++acc.censored;
        continue;
      }
      const double v = phi(exit_point);
      acc.sum += v;
      acc.sum_sq += v * v;
      ++acc.used;
    }
    return acc;
  });
  Acc t;
  for (const Acc& a : blocks) {
    t.sum += a.sum;
    t.sum_sq += a.sum_sq;
    t.used += a.used;
    t.censored += a.censored;
  }
  PerronEstimate est;
  est.datum = datum;
  est.n_paths = cfg.n_paths;
  est.censored = t.censored;
  est.flagged = t.censored * 1000 > cfg.n_paths;
  if (t.used == 0) throw NumericalError("every Perron path was censored");
  const double n = static_cast<double>(t.used);
  est.value = t.sum / n;
  const double var = std::max(0.0, t.sum_sq / n - est.value * est.value);
  est.ci_halfwidth = 1.96 * std::sqrt(var / n);
  return est;
}

std::string ProbeResult::to_json() const {
  nlohmann::json tr = nlohmann::json::array();
  for (const ProbeStep& st : trace) {
    std::vector<double> x(st.z.x.coords().begin(), st.z.x.coords().end());
    tr.push_back({{"x", x},
                  {"t", st.z.t},
                  {"depth", st.depth},
                  {"value", st.estimate.value},
                  {"ci", st.estimate.ci_halfwidth},
                  {"censored", st.estimate.censored},
                  {"flagged", st.estimate.flagged}});
  }
  return nlohmann::json{{"verdict", nlohmann::json::parse(verdict.to_json())}, {"rho", rho}, {"trace", tr}}.dump(2);
}

ProbeResult regularity_probe(const Domain& domain, const SimConfig& cfg, const ProbeConfig& probe) {
  cfg.check();
  require(probe.levels >= 3, "probe needs at least three levels");
  const GroupModel& model = domain.model();
  const SpaceTimePoint z0 = domain.z0();
  ProbeResult res;
  res.rho = domain.scale() / 4.0;
  const double rho = res.rho;
  auto phi = [&](const SpaceTimePoint& zeta) {
    return std::min(1.0, model.parabolic_distance(zeta, z0) / rho);
  };
  const double s0 = probe.s0 > 0.0 ? probe.s0 : 0.25 * rho * rho;

  std::vector<Point> dirs{model.identity()};
  for (double c : {0.5, 1.0, 2.0}) {
    for (int axis = 0; axis < std::min(2, model.topological_dimension()); ++axis) {
      for (double sign : {-1.0, 1.0}) {
        Point u = model.identity();
        u[axis] = sign * c;
        dirs.push_back(u);
      }
    }
  }

  SimConfig c = cfg;
  c.t_origin = z0.t;
  for (int j = 0; j < probe.levels; ++j) {
    const double s = s0 * std::pow(0.25, j);
    std::optional<SpaceTimePoint> start;
    for (const Point& u : dirs) {
      const SpaceTimePoint cand{model.compose(z0.x, model.dilate(std::sqrt(s), u)), z0.t - s};
      if (domain.contains(cand)) {
        start = cand;
        break;
      }
    }
    if (!start) throw NumericalError("no interior approach point found at depth " + std::to_string(s));
    c.seed = mix64(cfg.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(j + 1));
    ProbeStep st;
    st.z = *start;
    st.depth = s;
    st.estimate = perron_estimate(domain, phi, *start, c, "min(1, dist/rho)");
    res.trace.push_back(st);
  }

  const std::size_t L = res.trace.size();
  const auto& e = res.trace;
  bool monotone = true;
  for (std::size_t j = L - 3; j + 1 < L; ++j) {
    const double slack = 2.0 * (e[j].estimate.ci_halfwidth + e[j + 1].estimate.ci_halfwidth);
    if (e[j + 1].estimate.value > e[j].estimate.value + slack) monotone = false;
  }
  const double last = e[L - 1].estimate.value;
  bool high = true;
  for (std::size_t j = L - 3; j < L; ++j) high = high && e[j].estimate.value > probe.eps_irr;
  Verdict& v = res.verdict;
  v.numbers["last_estimate"] = last;
  v.numbers["last_ci"] = e[L - 1].estimate.ci_halfwidth;
  v.numbers["rho"] = rho;
  if (last < probe.eps_reg && monotone) {
    v.kind = VerdictKind::RegularLikely;
    v.evidence = "Perron estimates of the distance datum decrease below eps_reg along the approach";
  } else if (high) {
    v.kind = VerdictKind::IrregularLikely;
    v.evidence = "Perron estimates stay above eps_irr on the last three approach points";
  } else {
    v.kind = VerdictKind::Inconclusive;
    v.evidence = "approach estimates neither vanish nor stabilize above eps_irr";
  }
  v.evidence += " (Monte Carlo diffusion oracle)";
  return res;
}

}  // namespace hypowiener
