#include <gtest/gtest.h>

#include <cmath>

#include "hypowiener/diffusion.hpp"
#include "hypowiener/error.hpp"

using namespace hypowiener;

namespace {
const GroupModel E1 = GroupModel::euclidean(1);
const GroupModel H1 = GroupModel::heisenberg();
LocalBox box1() { return Domain::default_box(E1, 2.0, 2.0, 1.0); }
}  // namespace

TEST(Diffusion, IncrementMoments) {
  const double h = 0.01;
  const int n = 200000;
  CounterRng rng(1, 2);
  double sx = 0, sxx = 0, sz = 0, szz = 0;
  for (int i = 0; i < n; ++i) {
    const Point d = draw_increment(H1, h, rng);
    sx += d[0];
    sxx += d[0] * d[0];
    sz += d[2];
    szz += d[2] * d[2];
  }
  EXPECT_NEAR(sx / n, 0.0, 4.0 * std::sqrt(2 * h / n));
  EXPECT_NEAR(sxx / n, 2 * h, 0.02 * 2 * h);
  EXPECT_NEAR(sz / n, 0.0, 4.0 * h / std::sqrt(n));
  // Levy area of a planar motion with variance 2 per unit time has variance h^2.
  EXPECT_NEAR(szz / n, h * h, 0.03 * h * h);
  CounterRng r2(1, 2);
  EXPECT_EQ(draw_increment(E1, h, r2).size(), 1u);
}

TEST(Diffusion, HittingProbabilityReflectionPrinciple) {
  // P(max_{[0,1]} sqrt(2) B >= 1/2) = erfc(1/4).
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_paths = 4000;
  cfg.seed = 3;
  const auto h = hitting_probability(E1, [](const SpaceTimePoint& z) { return z.x[0] >= 0.5; }, {{0.0}, 0.0}, -1.0, cfg);
  EXPECT_NEAR(h.p_hat, std::erfc(0.25), 0.035);
  EXPECT_LE(h.ci_lo, h.p_hat);
  EXPECT_GE(h.ci_hi, h.p_hat);
  EXPECT_EQ(h.n_paths, 4000u);
}

TEST(Diffusion, PerronReproducesCaloricData) {
  const Domain d = Domain::punctured_slab(E1, {{0.0}, 0.0}, box1());
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_paths = 3000;
  cfg.seed = 4;
  auto u = [](const SpaceTimePoint& z) { return z.x[0] * z.x[0] + 2.0 * z.t; };
  const SpaceTimePoint z{{0.3}, -0.5};
  const auto e = perron_estimate(d, u, z, cfg, "x^2 + 2t");
  EXPECT_NEAR(e.value, u(z), std::max(3.0 * e.ci_halfwidth, 0.02));
  EXPECT_FALSE(e.flagged);
  EXPECT_EQ(e.censored, 0u);
}

TEST(Diffusion, PerronFlagsCensoring) {
  const Domain d = Domain::punctured_slab(E1, {{0.0}, 0.0}, box1());
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_paths = 100;
  cfg.max_steps = 5;
  cfg.seed = 4;
  EXPECT_THROW(perron_estimate(d, [](const SpaceTimePoint&) { return 1.0; }, {{0.0}, -0.5}, cfg), NumericalError);
  EXPECT_THROW(perron_estimate(d, [](const SpaceTimePoint&) { return 1.0; }, {{5.0}, -0.5}, cfg), ConfigError);
}

TEST(Diffusion, PathsAreReproducibleAndIndependentOfJobs) {
  SimConfig cfg;
  cfg.seed = 77;
  cfg.t_floor = -0.05;
  const auto a = sample_path(H1, {{0.0, 0.0, 0.0}, 0.0}, cfg, 5);
  const auto b = sample_path(H1, {{0.0, 0.0, 0.0}, 0.0}, cfg, 5);
  const auto c = sample_path(H1, {{0.0, 0.0, 0.0}, 0.0}, cfg, 6);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].x, b[i].x);
  EXPECT_NE(a.back().x, c.back().x);

  SimConfig h;
  h.n_paths = 500;
  h.seed = 12;
  auto F = [](const SpaceTimePoint& z) { return z.x[0] > 0.3; };
  set_worker_count(1);
  const auto one = hitting_probability(H1, F, {{0.0, 0.0, 0.0}, 0.0}, -0.1, h);
  set_worker_count(3);
  const auto three = hitting_probability(H1, F, {{0.0, 0.0, 0.0}, 0.0}, -0.1, h);
  set_worker_count(0);
  EXPECT_EQ(one.hits, three.hits);
}

TEST(Diffusion, RelativeStepsReachTinyDepths) {
  SimConfig cfg;
  cfg.dt = 0.1;
  cfg.dt_relative = 0.05;
  cfg.dt_min = 1e-300;
  cfg.t_origin = 0.0;
  cfg.t_floor = -1.0;
  std::size_t n = 0;
  walk_path(E1, {{0.0}, -1e-40}, cfg, 0, [&](const SpaceTimePoint&, const SpaceTimePoint&) {
    ++n;
    return false;
  });
  // About 4 * log(1e40) / log(1.05) sub-steps.
  EXPECT_GT(n, 4000u);
  EXPECT_LT(n, 12000u);
}

TEST(Diffusion, ProbeSeparatesSlabFromHalfSpace) {
  SimConfig cfg;
  cfg.dt = 0.05;
  cfg.dt_relative = 0.05;
  cfg.dt_min = 1e-12;
  cfg.n_paths = 600;
  cfg.seed = 21;
  const auto slab = regularity_probe(Domain::punctured_slab(E1, {{0.0}, 0.0}, box1()), cfg);
  EXPECT_EQ(slab.verdict.kind, VerdictKind::IrregularLikely) << slab.to_json();
  const auto half = regularity_probe(Domain::half_space_complement(E1, {{0.0}, 0.0}, box1()), cfg);
  EXPECT_EQ(half.verdict.kind, VerdictKind::RegularLikely) << half.to_json();
  EXPECT_EQ(half.trace.size(), 8u);
  for (std::size_t j = 1; j < half.trace.size(); ++j) EXPECT_NEAR(half.trace[j].depth, half.trace[j - 1].depth / 4, 1e-15);
}

TEST(Diffusion, ConfigJson) {
  SimConfig c;
  c.dt = 2e-3;
  c.seed = 9;
  c.t_origin = 1.5;
  const SimConfig back = SimConfig::from_json(c.to_json());
  EXPECT_EQ(back.dt, c.dt);
  EXPECT_EQ(back.seed, 9u);
  EXPECT_EQ(*back.t_origin, 1.5);
  EXPECT_EQ(back.hash(), c.hash());
  EXPECT_THROW(SimConfig::from_json(R"({"dt": -1})"), ConfigError);
}
