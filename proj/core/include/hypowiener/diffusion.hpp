#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hypowiener/random.hpp"
#include "hypowiener/regions.hpp"
#include "hypowiener/verdict.hpp"

namespace hypowiener {

/// Space-time diffusion generated by the horizontal sub-Laplacian, run
/// backward in time. Each step of length h is assembled from `substeps`
/// sub-increments and every sub-point is reported to the caller.
struct SimConfig {
  double dt = 1e-3;  // step (upper bound when dt_relative > 0)
  std::size_t n_paths = 10000;
  std::uint64_t seed = 0;
  double t_floor = -std::numeric_limits<double>::infinity();
  std::size_t max_steps = 1000000;
  // When positive, h = clamp(dt_relative * (t_origin - t), dt_min, dt).
  double dt_relative = 0.0;
  double dt_min = 1e-300;
  int substeps = 4;
  std::optional<double> t_origin;  // defaults to the start time

  void check() const;
  std::string to_json() const;
  std::uint64_t hash() const;
  /// Missing keys keep their defaults.
  static SimConfig from_json(const std::string& text);
};

struct HittingEstimate {
  double p_hat = 0.0;
  double ci_halfwidth = 0.0;  // Wilson 95%
  double ci_lo = 0.0, ci_hi = 0.0;
  std::size_t n_paths = 0;
  std::size_t hits = 0;
  std::uint64_t seed = 0;
};

struct PerronEstimate {
  double value = 0.0;
  double ci_halfwidth = 0.0;
  std::string datum;
  std::size_t n_paths = 0;
  std::size_t censored = 0;
  bool flagged = false;  // more than 0.1% of paths censored
};

enum class WalkEnd { Stopped, Floor, MaxSteps };

/// Draws one increment of the process over time h, as a group element.
/// H^1 uses the Levy-area rule: horizontal N(0, 2h) pair and a centered
/// Gaussian center with variance (h^2/3)(1 + |dW|^2/(2h)).
Point draw_increment(const GroupModel& model, double h, CounterRng& rng);

/// Runs path `path_index`; visit(prev, cur) is called at every sub-point and
/// stops the walk when it returns true.
WalkEnd walk_path(const GroupModel& model, const SpaceTimePoint& z_start, const SimConfig& cfg,
                  std::uint64_t path_index,
                  const std::function<bool(const SpaceTimePoint& prev, const SpaceTimePoint& cur)>& visit);

/// Points after each full step, starting with z_start, until t_floor or max_steps.
std::vector<SpaceTimePoint> sample_path(const GroupModel& model, const SpaceTimePoint& z_start, const SimConfig& cfg,
                                        std::uint64_t path_index = 0);

using SpaceTimePredicate = std::function<bool(const SpaceTimePoint&)>;

/// Fraction of paths from z_start that enter F before time t_min.
HittingEstimate hitting_probability(const GroupModel& model, const SpaceTimePredicate& F,
                                    const SpaceTimePoint& z_start, double t_min, const SimConfig& cfg);

/// Mean of phi at the first exit point from the domain, located by bisection
/// between the last inside and the first outside sub-point.
PerronEstimate perron_estimate(const Domain& domain, const std::function<double(const SpaceTimePoint&)>& phi,
                               const SpaceTimePoint& z, const SimConfig& cfg, const std::string& datum = "phi");

struct ProbeConfig {
  double eps_reg = 0.05;
  double eps_irr = 0.2;
  int levels = 8;
  double s0 = 0.0;  // first approach depth; 0 means (rho/2)^2
};

struct ProbeStep {
  SpaceTimePoint z;
  double depth = 0.0;
  PerronEstimate estimate;
};

struct ProbeResult {
  Verdict verdict;
  std::vector<ProbeStep> trace;
  double rho = 0.0;
  std::string to_json() const;
};

/// Perron estimates of phi = min(1, parabolic_distance(., z0)/rho), rho = scale/4,
/// at points approaching z0 from inside with depths s0 4^{-j}.
ProbeResult regularity_probe(const Domain& domain, const SimConfig& cfg, const ProbeConfig& probe = {});

}  // namespace hypowiener
