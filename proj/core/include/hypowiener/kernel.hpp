#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hypowiener/carnot.hpp"

namespace hypowiener {

/// Tolerances for the oscillatory-integral evaluation of the Heisenberg heat
/// kernel. Ignored by the Euclidean kernel, which is closed form.
struct QuadratureConfig {
  double rel_tol = 1e-10;     // target relative accuracy of each evaluation
  double accept_tol = 1e-6;   // evaluations with a worse error estimate throw
  unsigned max_depth = 12;    // adaptive Gauss-Kronrod bisection depth
  bool memoize = false;       // share evaluations through a process memo table
};

/// Result of one Heisenberg quadrature: log p_1(g) and its relative error estimate.
struct KernelValue {
  double log_value = 0.0;
  double rel_error = 0.0;
};

/// log p_1(w, z) for the heat semigroup of X^2 + Y^2 on H^1, as a function of
/// |w|^2 and z. Uses
///   p_1 = (4 pi^2)^{-1} int_0^inf (u / sinh u) exp(-|w|^2 u coth(u) / 4) cos(z u) du
/// with the contour moved to the steepest-descent line Im u = theta so that the
/// integrand stops oscillating in the far field.
KernelValue heisenberg_log_p1(double horizontal_sq, double vertical, const QuadratureConfig& cfg);

/// Thread-safe memo table for Heisenberg profile evaluations, keyed by the exact
/// bit patterns of (|w|^2, |z|). Correctness never depends on a hit.
class KernelMemo {
 public:
  KernelMemo();
  ~KernelMemo();
  bool lookup(double horizontal_sq, double vertical, double& log_value) const;
  void insert(double horizontal_sq, double vertical, double log_value);
  std::size_t size() const;
  void save(const std::string& path) const;
  void load(const std::string& path);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::shared_ptr<KernelMemo> shared_kernel_memo();

/// Fundamental solution of sum X_i^2 - d/dt for one of the model groups.
///
/// Gamma((x,t),(xi,tau)) = p_{t-tau}(xi^{-1} o x) for t > tau and 0 otherwise,
/// where p_s(g) = s^{-Q/2} p_1(D_{1/sqrt(s)} g). Evaluations that fall below
/// 1e-300 are returned as 0; log_* variants keep full range.
class HeatKernel {
 public:
  explicit HeatKernel(GroupModel model, QuadratureConfig cfg = {});

  const GroupModel& model() const { return model_; }
  const QuadratureConfig& config() const { return cfg_; }

  double operator()(const SpaceTimePoint& z, const SpaceTimePoint& zeta) const;
  /// log Gamma(z, zeta); -inf when t <= tau.
  double log_gamma(const SpaceTimePoint& z, const SpaceTimePoint& zeta) const;

  /// log p_s(g) for the left-translated offset g and time lag s.
  double log_local(const Point& g, double s) const;
  double local(const Point& g, double s) const;
  /// log p_1(g).
  double log_profile(const Point& g) const;
  /// log p_s(0), the largest value of Gamma at lag s.
  double log_on_diagonal(double s) const;

 private:
  GroupModel model_;
  QuadratureConfig cfg_;
  std::shared_ptr<KernelMemo> memo_;
};

/// Closed-form Euclidean heat kernel (4 pi s)^{-N/2} exp(-|x - xi|^2 / 4s).
double gamma_euclidean(const GroupModel& model, const SpaceTimePoint& z, const SpaceTimePoint& zeta);
/// Heisenberg heat kernel through quadrature; throws NumericalError when the
/// quadrature misses accept_tol.
double gamma_heisenberg(const SpaceTimePoint& z, const SpaceTimePoint& zeta, const QuadratureConfig& cfg = {});

/// G_a(z, zeta) = exp(-a d(x,xi)^2 / (t - tau)) / |B(x, sqrt(t - tau))|, 0 for t <= tau.
double gaussian_G(const GroupModel& model, double a, const SpaceTimePoint& z, const SpaceTimePoint& zeta);

// ---------------------------------------------------------------------------
// Gaussian two-sided bounds  (1/Lambda) G_b0 <= Gamma <= Lambda G_a0

struct SampleSpec {
  double lag_min = 1e-3;       // t - tau range, log-spaced
  double lag_max = 1e3;
  int lag_count = 13;
  double ratio_max = 50.0;     // d^2 / (t - tau) range, uniform
  int ratio_count = 51;
  int direction_count = 16;    // directions on the unit gauge sphere
  double lambda_slack = 1.0;   // admissible Lambda relative to the on-diagonal ratio
  double a_max = 10.0;
  double b_max = 10.0;
  // When both are positive the exponents are taken as given and only Lambda is fitted.
  double fixed_a0 = 0.0;
  double fixed_b0 = 0.0;
  // Explicit sample points (offset g, lag s); used instead of the grid when non-empty.
  std::vector<std::pair<Point, double>> explicit_points;

  std::string to_json() const;
  std::uint64_t hash() const;
};

struct BoundConstants {
  std::string model;
  double a0 = 0.0;
  double b0 = 0.0;
  double lambda = 1.0;
  double c_d = 2.0;
  double Q = 1.0;
  std::uint64_t sample_spec_hash = 0;
  std::size_t sample_size = 0;

  std::string to_json() const;
  static BoundConstants from_json(const std::string& text);
};

/// Grid of (offset, lag) pairs described by a SampleSpec.
std::vector<std::pair<Point, double>> bound_sample_points(const GroupModel& model, const SampleSpec& spec);

/// Fits (a0, b0, Lambda). The exponents are the extreme admissible values for
/// which each one-sided ratio stays within lambda_slack of its on-diagonal
/// value; Lambda is then the smallest constant making the sandwich hold at
/// every sample point. Throws NumericalError if no feasible triple exists.
BoundConstants fit_gaussian_bounds(const HeatKernel& kernel, const SampleSpec& spec);

/// Largest violation factor of the sandwich over the given points; <= 1 means it holds.
double sandwich_violation(const HeatKernel& kernel, const BoundConstants& bounds,
                          const std::vector<std::pair<Point, double>>& points);

/// Exact constants for Euclidean(N): Gamma = omega_N (4 pi)^{-N/2} G_{1/4}.
BoundConstants euclidean_bound_constants(int n);

// ---------------------------------------------------------------------------
// Numerical identity checks

struct IntegrationBudget {
  double tolerance = 1e-10;          // deterministic quadrature target
  std::size_t mc_samples = 1000000;  // Monte Carlo sample count
  std::uint64_t seed = 1;
};

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;  // quadrature error estimate, or 1.96 * standard error for MC
  std::size_t evaluations = 0;
};

/// int Gamma(x0, t, xi, tau) d xi. Adaptive quadrature for Euclidean models,
/// importance-sampled Monte Carlo for Heisenberg.
IntegralEstimate normalization_check(const HeatKernel& kernel, const Point& x0, double t, double tau,
                                     const IntegrationBudget& budget);

/// |int Gamma(z,(xi,tau)) Gamma((xi,tau),eta) dxi - Gamma(z,eta)| / Gamma(z,eta).
/// The error field carries the integration error relative to Gamma(z, eta).
IntegralEstimate chapman_kolmogorov_check(const HeatKernel& kernel, const SpaceTimePoint& z, double tau,
                                          const SpaceTimePoint& eta, const IntegrationBudget& budget);

}  // namespace hypowiener
