#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hypowiener/error.hpp"
#include "hypowiener/kernel.hpp"
#include "hypowiener/random.hpp"
#include "json.hpp"

namespace hypowiener {

namespace {

// Points on the unit gauge sphere.
std::vector<Point> gauge_directions(const GroupModel& model, int count) {
  std::vector<Point> dirs;
  const int n = model.topological_dimension();
  if (model.kind() == GroupKind::Heisenberg1) {
    // |w|^2 = cos(phi), z = sin(phi)/4 gives |w|^4 + 16 z^2 = 1.
    const int n_phi = std::max(2, count);
    for (int i = 0; i < n_phi; ++i) {
      const double phi = -0.5 * std::numbers::pi + std::numbers::pi * i / (n_phi - 1);
      const double r = std::sqrt(std::max(0.0, std::cos(phi)));
      for (int j = 0; j < 4; ++j) {
        const double psi = 0.5 * std::numbers::pi * j + 0.3;
        dirs.push_back(Point{r * std::cos(psi), r * std::sin(psi), 0.25 * std::sin(phi)});
      }
    }
    return dirs;
  }
  if (n == 1) return {Point{1.0}, Point{-1.0}};
  if (n == 2) {
    for (int i = 0; i < std::max(1, count); ++i) {
      const double a = 2.0 * std::numbers::pi * i / std::max(1, count);
      dirs.push_back(Point{std::cos(a), std::sin(a)});
    }
    return dirs;
  }
  // Fibonacci lattice on S^2.
  const int m = std::max(1, count);
  for (int i = 0; i < m; ++i) {
    const double zc = 1.0 - 2.0 * (i + 0.5) / m;
    const double r = std::sqrt(1.0 - zc * zc);
    const double a = std::numbers::pi * (3.0 - std::sqrt(5.0)) * i;
    dirs.push_back(Point{r * std::cos(a), r * std::sin(a), zc});
  }
  return dirs;
}

}  // namespace

std::string SampleSpec::to_json() const {
  nlohmann::json j{{"lag_min", lag_min},       {"lag_max", lag_max},       {"lag_count", lag_count},
                   {"ratio_max", ratio_max},   {"ratio_count", ratio_count}, {"direction_count", direction_count},
                   {"lambda_slack", lambda_slack}, {"a_max", a_max},     {"b_max", b_max},
                   {"fixed_a0", fixed_a0},     {"fixed_b0", fixed_b0}};
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& [g, s] : explicit_points) {
    nlohmann::json row = nlohmann::json::array();
    for (double c : g.coords()) row.push_back(c);
    pts.push_back({{"g", row}, {"lag", s}});
  }
  j["explicit_points"] = pts;
  return j.dump();
}

std::uint64_t SampleSpec::hash() const { return hash_string(to_json()); }

std::string BoundConstants::to_json() const {
  return nlohmann::json{{"model", model},   {"a0", a0}, {"b0", b0}, {"lambda", lambda},
                        {"c_d", c_d},       {"Q", Q},   {"sample_spec_hash", sample_spec_hash},
                        {"sample_size", sample_size}}
      .dump(2);
}

BoundConstants BoundConstants::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("bound constants: invalid JSON");
  BoundConstants b;
  try {
    b.model = j.at("model").get<std::string>();
    b.a0 = j.at("a0").get<double>();
    b.b0 = j.at("b0").get<double>();
    b.lambda = j.at("lambda").get<double>();
    b.c_d = j.at("c_d").get<double>();
    b.Q = j.at("Q").get<double>();
    b.sample_spec_hash = j.value("sample_spec_hash", std::uint64_t{0});
    b.sample_size = j.value("sample_size", std::size_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bound constants: ") + e.what());
  }
  require(b.a0 > 0.0 && b.a0 <= b.b0 && b.lambda >= 1.0 && b.c_d > 1.0 && b.Q > 0.0,
          "bound constants violate 0 < a0 <= b0, Lambda >= 1, c_d > 1");
  return b;
}

std::vector<std::pair<Point, double>> bound_sample_points(const GroupModel& model, const SampleSpec& spec) {
  if (!spec.explicit_points.empty()) return spec.explicit_points;
  require(spec.lag_min > 0.0 && spec.lag_max >= spec.lag_min && spec.lag_count >= 1, "invalid lag range");
  require(spec.ratio_max >= 0.0 && spec.ratio_count >= 1, "invalid ratio range");
  const auto dirs = gauge_directions(model, spec.direction_count);
  std::vector<std::pair<Point, double>> pts;
  pts.reserve(static_cast<std::size_t>(spec.lag_count * spec.ratio_count) * dirs.size());
  for (int i = 0; i < spec.lag_count; ++i) {
    const double f = spec.lag_count == 1 ? 0.0 : static_cast<double>(i) / (spec.lag_count - 1);
    const double s = spec.lag_min * std::pow(spec.lag_max / spec.lag_min, f);
    for (int j = 0; j < spec.ratio_count; ++j) {
      const double ratio = spec.ratio_count == 1 ? spec.ratio_max : spec.ratio_max * j / (spec.ratio_count - 1);
      const double r = std::sqrt(ratio * s);
      for (const Point& u : dirs) pts.emplace_back(r > 0.0 ? model.dilate(r, u) : model.identity(), s);
    }
  }
  return pts;
}

BoundConstants euclidean_bound_constants(int n) {
  const GroupModel m = GroupModel::euclidean(n);
  const double c = m.unit_ball_volume() * std::pow(4.0 * std::numbers::pi, -0.5 * n);
  BoundConstants b;
  b.model = m.name();
  b.a0 = b.b0 = 0.25;
  b.lambda = std::max(c, 1.0 / c);
  b.c_d = std::pow(2.0, n);
  b.Q = n;
  return b;
}

BoundConstants fit_gaussian_bounds(const HeatKernel& kernel, const SampleSpec& spec) {
  const GroupModel& model = kernel.model();
  require(spec.lambda_slack >= 1.0, "lambda_slack must be >= 1");
  const auto pts = bound_sample_points(model, spec);
  require(!pts.empty(), "empty bound-fitting sample");

  // For each point: u = log(Gamma |B(sqrt s)|), q = d^2 / s.
  //   log(Gamma / G_a)  = u + a q
  //   log(G_b / Gamma)  = -u - b q
  struct Row {
    double u, q;
  };
  const auto blocks = map_blocks<std::vector<Row>>(pts.size(), 1024, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<Row> rows;
    rows.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      const auto& [g, s] = pts[i];
      const double d = model.gauge(g);
      rows.push_back({kernel.log_local(g, s) + std::log(model.ball_volume(std::sqrt(s))), d * d / s});
    }
    return rows;
  });
  std::vector<Row> rows;
  rows.reserve(pts.size());
  for (const auto& b : blocks) rows.insert(rows.end(), b.begin(), b.end());

  constexpr double kTol = 1e-12;
  double a0 = spec.fixed_a0;
  double b0 = spec.fixed_b0;
  if (!(a0 > 0.0 && b0 > 0.0)) {
    const double u_ref = kernel.log_on_diagonal(1.0) + std::log(model.unit_ball_volume());
    const double cap_up = std::log(spec.lambda_slack) + u_ref;
    const double cap_low = std::log(spec.lambda_slack) - u_ref;
    a0 = spec.a_max;
    double b_needed = 0.0;
    for (const Row& r : rows) {
      if (r.q > 0.0) {
        a0 = std::min(a0, (cap_up + kTol - r.u) / r.q);
        b_needed = std::max(b_needed, (-r.u - cap_low - kTol) / r.q);
      } else if (r.u > cap_up + 1e-9 || -r.u > cap_low + 1e-9) {
        throw NumericalError("bound fit: on-diagonal ratio exceeds the admissible Lambda");
      }
    }
    if (!(a0 > 0.0))
      throw NumericalError("bound fit: no positive a0 keeps Gamma / G_a0 within the admissible Lambda");
    b0 = std::max(a0, b_needed);
    if (b0 > spec.b_max) throw NumericalError("bound fit: b0 exceeds the configured search range");
  }
  require(a0 <= b0, "fixed exponents must satisfy a0 <= b0");

  double log_lambda = 0.0;
  for (const Row& r : rows) log_lambda = std::max({log_lambda, r.u + a0 * r.q, -r.u - b0 * r.q});

  BoundConstants out;
  out.model = model.name();
  out.a0 = a0;
  out.b0 = b0;
  out.lambda = std::exp(log_lambda);
  out.Q = model.homogeneous_dimension();
  out.c_d = std::pow(2.0, out.Q);
  out.sample_spec_hash = spec.hash();
  out.sample_size = pts.size();
  return out;
}

double sandwich_violation(const HeatKernel& kernel, const BoundConstants& bounds,
                          const std::vector<std::pair<Point, double>>& points) {
  const GroupModel& model = kernel.model();
  double worst = 0.0;
  for (const auto& [g, s] : points) {
    const double d = model.gauge(g);
    const double u = kernel.log_local(g, s) + std::log(model.ball_volume(std::sqrt(s)));
    const double q = d * d / s;
    worst = std::max({worst, u + bounds.a0 * q - std::log(bounds.lambda), -u - bounds.b0 * q - std::log(bounds.lambda)});
  }
  return std::exp(worst);
}

}  // namespace hypowiener
