#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hypowiener/kernel.hpp"
#include "hypowiener/regions.hpp"

namespace hypowiener {

using AlphaFn = std::function<double(int)>;

/// alpha(k) = k log k, natural log; alpha(1) = 0.
double alpha(int k);

/// Shell Omega_k^c(z0) = {z in S \ Omega : lambda^{-alpha(k)} <= Gamma(z0, z) <= lambda^{-alpha(k+1)}} u {z0}.
/// z0 is the domain's distinguished point. A null domain treats the whole
/// space as complement.
struct ShellSpec {
  double lambda = 0.5;
  int k = 1;
  const Domain* domain = nullptr;
  const HeatKernel* kernel = nullptr;
  AlphaFn alpha_fn;  // empty: k log k

  double alpha_of(int j) const;
  /// log lambda^{-alpha(j)}.
  double log_level(int j) const;
  SpaceTimePoint z0() const;
  void check() const;
};

/// Depth interval [log s_lo, log s_hi] on which a point with normalized offset
/// xi (log p_1(xi) given) lies in the Gamma-band of shell k.
std::pair<double, double> band_log_depths(const ShellSpec& spec, double log_p1);

bool shell_membership(const SpaceTimePoint& z, const ShellSpec& spec);
/// Same test in local coordinates g = x0^{-1} o x, s = t0 - t.
bool shell_local_membership(const Point& g, double s, const ShellSpec& spec);
/// E_k(z0) = {Gamma(z0, z) >= lambda^{-alpha(k)}} u {z0}.
bool ek_membership(const SpaceTimePoint& z, const ShellSpec& spec);

/// log of the depth T at which the on-diagonal value p_T(0) equals lambda^{-alpha(k)}.
/// Euclidean: closed form; H^1: bisection on the on-diagonal profile.
double log_compute_Tk(const HeatKernel& kernel, double lambda, int k, const AlphaFn& alpha_fn = {});
double compute_Tk(const ShellSpec& spec);

struct ProofConstants {
  double beta = 0.5;
  double Q_beta = 0.0;
  double m = 0.0;
  double q0 = 0.0;
  int q = 0;
  int p = 0;
  int i = 0;
  double lambda = 0.5;
  std::string to_json() const;
};

ProofConstants proof_constants(double beta, double lambda, double Q, double c_d, double Lambda, double a0, int i = 0);

/// lambda^{-(alpha(kq+p+i) - alpha(kq+i))} > 4 c_d^2 Lambda^2, checked in log form.
bool oneforall_holds(const ProofConstants& pc, int k, double c_d, double Lambda, const AlphaFn& alpha_fn = {});

struct TStar {
  int index = 0;            // kq + p + i
  int shell_index = 0;      // kq + i
  double log_t_star = 0.0;
  double log_ball = 0.0;    // log |B(x0, sqrt(T*))|
  double log_lower = 0.0;   // log Lambda lambda^{alpha(kq+p+i)}
  double log_upper = 0.0;   // log 2 c_d Lambda lambda^{alpha(kq+p+i)}
  double log_T = 0.0;       // log T_{kq+i}
};

/// T* with Lambda lambda^{alpha} <= |B(x0, sqrt(T*))| <= 2 c_d Lambda lambda^{alpha} and
/// T* < T_{kq+i}. Throws NumericalError when the bracket fails.
TStar find_t_star(int k, const ProofConstants& pc, const BoundConstants& bc, const HeatKernel& kernel,
                  const AlphaFn& alpha_fn = {});
/// The same T* through bisection on r -> |B(x0, r)| (no closed-form inversion).
double log_t_star_bisection(int k, const ProofConstants& pc, const BoundConstants& bc, const GroupModel& model,
                            const AlphaFn& alpha_fn = {});

struct ShellSplit {
  std::function<bool(const SpaceTimePoint&)> F0;  // shell and t >= t0 - T*
  std::function<bool(const SpaceTimePoint&)> F;   // shell and t <= t0 - T*
};

ShellSplit split_shell(const ShellSpec& spec, double t_star);

/// Ordering of the far parts F_k in log-depth. Real proof constants put the
/// shells far below the smallest double, so depths stay logarithmic here.
/// Offsets are sampled on the unit gauge sphere scaled by `radii` and the
/// Gamma-band of shell kq+i is intersected with {depth >= T*_k}.
struct OrderingReport {
  std::vector<std::pair<double, double>> log_depth_ranges;  // (min, max) over F_k, k = 1..K
  std::vector<int> shell_index;
  bool holds = false;
  std::string to_json() const;
};

OrderingReport split_ordering(const ProofConstants& pc, const BoundConstants& bc, const HeatKernel& kernel, int K,
                              std::size_t offsets, std::uint64_t seed, const AlphaFn& alpha_fn = {});

/// Spatial envelope from Gamma <= Lambda G_a0:
/// d(x0, x)^2 <= (s / a0) log(Lambda lambda^{alpha(k)} / (omega s^{Q/2})).
struct ShellEnvelope {
  double log_K = 0.0;   // log(Lambda lambda^{alpha(k)} / omega)
  double a0 = 0.0;
  double Q = 0.0;
  double T = 0.0;       // T_k, deepest member
  double max_radius = 0.0;
  double r_k = 0.0;     // shell inside the parabolic ball B^(z0, r_k)

  /// Envelope radius at depth s (0 outside the admissible range).
  double radius(double s) const;
};

ShellEnvelope shell_envelope(const ShellSpec& spec, const BoundConstants& bc);

}  // namespace hypowiener
