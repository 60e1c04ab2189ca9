#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypowiener/diffusion.hpp"
#include "hypowiener/measure.hpp"
#include "hypowiener/verdict.hpp"

namespace hypowiener {

enum class Criterion { BalayageMC, CapacityProxy, MeasureTk, MeasureQ };

std::string criterion_name(Criterion c);
/// Accepts the CLI spellings measure-q, measure-tk, capacity, balayage-mc.
Criterion criterion_from_name(const std::string& name);

struct SeriesTerm {
  int k = 0;
  double value = 0.0;
  double uncertainty = 0.0;  // 95% half-width
};

/// value ~ c * alpha(k+1)^{-s} by weighted least squares in log-log form.
struct DecayFit {
  double c = 0.0;
  double s = 0.0;
  double s_se = 0.0;
  double log_c_se = 0.0;
  double chi2_red = 0.0;
  int n_used = 0;
  bool finite = false;
};

struct ClassifierConfig {
  int k_min = 3;
  int k_max = 0;  // 0: no upper cut
  int min_terms = 8;
  double eps_s = 0.15;
  double floor = 0.0;      // terms at or below count as zero
  int trailing_zeros = 3;  // this many vanishing final terms mean super-polynomial decay
  double z = 2.0;          // standard errors separating the fit from the threshold
};

DecayFit fit_decay(const std::vector<SeriesTerm>& terms, const ClassifierConfig& cfg, const AlphaFn& alpha_fn = {});

/// Finite-sample surrogate for divergence of sum a_k. Throws ConfigError with
/// fewer than min_terms usable terms.
Verdict classify_divergence(const std::vector<SeriesTerm>& terms, const ClassifierConfig& cfg,
                            DecayFit* fit_out = nullptr, const AlphaFn& alpha_fn = {});

struct SeriesReport {
  Criterion criterion = Criterion::MeasureQ;
  std::string bracket;  // "lower" / "upper" for capacity brackets
  std::vector<SeriesTerm> terms;
  std::vector<double> partial_sums;
  DecayFit fit;
  Verdict verdict;
  int k_lo = 1, k_hi = 1;
  double lambda = 0.5;
  std::uint64_t domain_hash = 0;
  std::uint64_t seed = 0;
  std::vector<SeriesReport> brackets;

  std::string to_json() const;
};

/// Relative steps of 5% of the depth below z0, 2000 paths.
inline SimConfig balayage_sim_defaults() {
  SimConfig c;
  c.dt = 1.0;
  c.n_paths = 2000;
  c.dt_relative = 0.05;
  c.dt_min = 1e-300;
  return c;
}

struct SeriesConfig {
  double lambda = 0.5;
  int K = 40;
  std::uint64_t seed = 1;
  VolumeBudget volume{100000, true};
  ClassifierConfig classifier;
  AlphaFn alpha_fn;  // empty: k log k
  // Balayage surrogate: paths start at depth start_fraction * T_{K+1} below z0.
  int balayage_K = 12;
  SimConfig sim = balayage_sim_defaults();
  double start_fraction = 1e-3;
};

/// Shell volumes k = 1..K, shared by the three measure-type series.
std::vector<VolumeEstimate> measure_volumes(const Domain& domain, const HeatKernel& kernel, const BoundConstants& bc,
                                            const SeriesConfig& cfg);

/// Terms |Omega_k^c| lambda^{-((Q+2)/Q) alpha(k)}.
SeriesReport series_measure_q(const Domain& domain, const HeatKernel& kernel, const BoundConstants& bc,
                              const SeriesConfig& cfg, const std::vector<VolumeEstimate>* volumes = nullptr);
/// Terms |Omega_k^c| / (T_k lambda^{alpha(k)}).
SeriesReport series_measure_Tk(const Domain& domain, const HeatKernel& kernel, const BoundConstants& bc,
                               const SeriesConfig& cfg, const std::vector<VolumeEstimate>* volumes = nullptr);
/// Lower bracket proxy / lambda^{alpha(k)} and upper bracket proxy / lambda^{alpha(k+1)},
/// with proxy = |Omega_k^c| / T_k. Verdict only when both brackets agree.
SeriesReport series_capacity_proxy(const Domain& domain, const HeatKernel& kernel, const BoundConstants& bc,
                                   const SeriesConfig& cfg, const std::vector<VolumeEstimate>* volumes = nullptr);
/// Term k: probability that the diffusion started just below z0 visits Omega_k^c.
SeriesReport series_balayage_mc(const Domain& domain, const HeatKernel& kernel, const SeriesConfig& cfg);

/// C* = Q / ((Q + 4) b0).
double critical_C(const BoundConstants& bc);

/// RegularLikely when the domain declares an exterior log-log condition with
/// 0 < C < C* and the inclusion holds on a sampled grid; Inconclusive otherwise.
Verdict paraboloid_test(const Domain& domain, const BoundConstants& bc, std::size_t samples = 4000,
                        std::uint64_t seed = 1);
/// RegularLikely when the domain declares an exterior parabolic cone and the
/// inclusion holds on a sampled grid; Inconclusive otherwise.
Verdict cone_test(const Domain& domain, std::size_t samples = 4000, std::uint64_t seed = 1);

}  // namespace hypowiener
