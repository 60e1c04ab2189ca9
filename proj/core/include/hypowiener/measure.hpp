#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypowiener/shells.hpp"

namespace hypowiener {

struct VolumeBudget {
  std::size_t n_samples = 100000;
  // Importance sampling in self-similar coordinates xi = D_{1/sqrt(s)} g
  // instead of rejection sampling inside the envelope.
  bool stratified = false;
};

struct VolumeEstimate {
  double mean = 0.0;
  double ci_halfwidth = 0.0;  // 95%
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  std::size_t hits = 0;
};

/// |Omega_k^c(z0)| by Monte Carlo. Plain mode samples uniformly in the
/// envelope box times (0, T_k]; stratified mode integrates the depth analytically
/// along each self-similar ray and samples only the normalized offset.
VolumeEstimate shell_volume(const ShellSpec& spec, const BoundConstants& bc, const VolumeBudget& budget,
                            std::uint64_t seed);

/// Volumes for several shell indices (spec.k is ignored). The stratified mode
/// shares the normalized offsets and their kernel values across indices.
std::vector<VolumeEstimate> shell_volumes(const ShellSpec& spec, const std::vector<int>& ks, const BoundConstants& bc,
                                          const VolumeBudget& budget, std::uint64_t seed);

struct CapacityProxy {
  double value = 0.0;
  double ci_halfwidth = 0.0;
  // cap_H >= (c/c0) |Omega_k^c| / T_k with c, c0 unknown structural constants.
  std::string note;
};

CapacityProxy capacity_bracket(const VolumeEstimate& volume, double Tk);

}  // namespace hypowiener
