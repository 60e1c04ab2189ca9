#include "hypowiener/measure.hpp"

#include <cmath>
#include <numbers>

#include "hypowiener/error.hpp"
#include "hypowiener/random.hpp"

namespace hypowiener {

namespace {

constexpr std::size_t kBlock = 2048;

struct Moments {
  double sum = 0.0, sum_sq = 0.0;
  std::size_t hits = 0;
};

VolumeEstimate plain_volume(const ShellSpec& spec, const BoundConstants& bc, std::size_t n, std::uint64_t seed) {
  const GroupModel& model = spec.kernel->model();
  const ShellEnvelope env = shell_envelope(spec, bc);
  const int dim = model.topological_dimension();
  const bool heis = model.kind() == GroupKind::Heisenberg1;
  const double R = env.max_radius;
  std::vector<double> half(static_cast<std::size_t>(dim), R);
  if (heis) half[2] = 0.25 * R * R;
  double box = env.T;
  for (double h : half) box *= 2.0 * h;
  VolumeEstimate est;
  est.n_samples = n;
  est.seed = seed;
  if (!(box > 0.0) || n == 0) return est;

  const auto blocks = map_blocks<std::size_t>(n, kBlock, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::size_t hits = 0;
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i);
      Point g = model.identity();
      for (int c = 0; c < dim; ++c) g[c] = half[c] * (2.0 * rng.uniform() - 1.0);
      const double s = env.T * rng.uniform();
      if (model.gauge(g) > env.radius(s)) continue;
      if (shell_local_membership(g, s, spec)) ++hits;
    }
    return hits;
  });
  for (std::size_t h : blocks) est.hits += h;
  const double p = static_cast<double>(est.hits) / static_cast<double>(n);
  est.mean = box * p;
  est.ci_halfwidth = 1.96 * box * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return est;
}

// Proposal for the normalized offset: N(0, 4) per horizontal coordinate and a
// unit Laplace law on the H^1 center. Returns log density.
double draw_offset(const GroupModel& model, CounterRng& rng, Point& xi) {
  const int dim = model.topological_dimension();
  xi = model.identity();
  double log_q = 0.0;
  const bool heis = model.kind() == GroupKind::Heisenberg1;
  const int gauss = heis ? 2 : dim;
  for (int c = 0; c < gauss; ++c) {
    xi[c] = 2.0 * rng.normal();
    log_q += -0.5 * std::log(8.0 * std::numbers::pi) - xi[c] * xi[c] / 8.0;
  }
  if (heis) {
    const double u = rng.uniform() - 0.5;
    xi[2] = -std::copysign(std::log(1.0 - 2.0 * std::abs(u)), u);
    log_q += -std::log(2.0) - std::abs(xi[2]);
  }
  return log_q;
}

std::vector<VolumeEstimate> stratified_volumes(const ShellSpec& spec, const std::vector<int>& ks, std::size_t n,
                                               std::uint64_t seed) {
  const GroupModel& model = spec.kernel->model();
  const double Q = model.homogeneous_dimension();
  const double e = 0.5 * (Q + 2.0);
  std::vector<ShellSpec> specs;
  for (int k : ks) {
    ShellSpec sk = spec;
    sk.k = k;
    sk.check();
    specs.push_back(sk);
  }
  const std::size_t nk = ks.size();
  using Block = std::vector<Moments>;
  const auto blocks = map_blocks<Block>(n, kBlock, [&](std::size_t, std::size_t begin, std::size_t end) {
    Block acc(nk);
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i);
      Point xi;
      const double log_q = draw_offset(model, rng, xi);
      const double log_p1 = spec.kernel->log_profile(xi);
      for (std::size_t j = 0; j < nk; ++j) {
        const auto [ls_lo, ls_hi] = band_log_depths(specs[j], log_p1);
        // Depth density proportional to s^{Q/2} on [s_lo, s_hi].
        CounterRng srng(mix64(seed ^ (0xA24BAED4963EE407ULL * static_cast<std::uint64_t>(ks[j] + 1))), i);
        const double r = std::exp(e * (ls_lo - ls_hi));
        const double u = srng.uniform();
        const double log_s = ls_hi + std::log(u + (1.0 - u) * r) / e;
        const double s = std::exp(log_s);
        const Point g = model.dilate(std::exp(0.5 * log_s), xi);
        if (spec.domain && spec.domain->local_contains(g, s)) continue;
        const double w = std::exp(e * ls_hi + std::log1p(-r) - std::log(e) - log_q);
        acc[j].sum += w;
        acc[j].sum_sq += w * w;
        ++acc[j].hits;
      }
    }
    return acc;
  });
  std::vector<VolumeEstimate> out(nk);
  for (std::size_t j = 0; j < nk; ++j) {
    Moments m;
    for (const Block& b : blocks) {
      m.sum += b[j].sum;
      m.sum_sq += b[j].sum_sq;
      m.hits += b[j].hits;
    }
    const double N = static_cast<double>(n);
    const double mean = m.sum / N;
    const double var = std::max(0.0, m.sum_sq / N - mean * mean);
    out[j] = {mean, 1.96 * std::sqrt(var / N), n, seed, m.hits};
  }
  return out;
}

}  // namespace

VolumeEstimate shell_volume(const ShellSpec& spec, const BoundConstants& bc, const VolumeBudget& budget,
                            std::uint64_t seed) {
  return shell_volumes(spec, {spec.k}, bc, budget, seed).front();
}

std::vector<VolumeEstimate> shell_volumes(const ShellSpec& spec, const std::vector<int>& ks, const BoundConstants& bc,
                                          const VolumeBudget& budget, std::uint64_t seed) {
  require(spec.kernel != nullptr, "shell needs a kernel");
  if (ks.empty()) return {};
  if (budget.stratified) {
    require(budget.n_samples >= 2, "volume estimation needs at least two samples");
    return stratified_volumes(spec, ks, budget.n_samples, seed);
  }
  std::vector<VolumeEstimate> out;
  for (int k : ks) {
    ShellSpec sk = spec;
    sk.k = k;
    sk.check();
    // Each index gets its own stream family so results do not depend on the list.
    out.push_back(plain_volume(sk, bc, budget.n_samples, mix64(seed + 0x632BE59BD9B4E019ULL * static_cast<std::uint64_t>(k))));
    out.back().seed = seed;
  }
  return out;
}

CapacityProxy capacity_bracket(const VolumeEstimate& volume, double Tk) {
  require(Tk > 0.0, "T_k must be positive");
  return {volume.mean / Tk, volume.ci_halfwidth / Tk,
          "proxy |Omega_k^c| / T_k; cap_H is bounded below by (c/c0) times this with unknown structural constants"};
}

}  // namespace hypowiener
