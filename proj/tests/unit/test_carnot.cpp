#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hypowiener/carnot.hpp"
#include "hypowiener/error.hpp"

using namespace hypowiener;

namespace {
void expect_near(const Point& a, const Point& b, double tol = 1e-14) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "coordinate " << i;
}
}  // namespace

TEST(Carnot, EuclideanComposeIsAddition) {
  const auto m = GroupModel::euclidean(2);
  expect_near(m.compose({1, 2}, {3, 4}), {4, 6});
  expect_near(m.inverse({5, -1}), {-5, 1});
}

TEST(Carnot, HeisenbergGroupLaw) {
  const auto h = GroupModel::heisenberg();
  expect_near(h.compose({1, 0, 0}, {0, 1, 0}), {1, 1, 0.5});
  expect_near(h.inverse({1, 1, 0.5}), {-1, -1, -0.5});
  const Point g{0.3, -1.2, 0.7};
  expect_near(h.compose(g, h.inverse(g)), h.identity());
  expect_near(h.inverse(h.identity()), h.identity());
}

TEST(Carnot, HeisenbergAssociativeAndNonCommutative) {
  const auto h = GroupModel::heisenberg();
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  for (int i = 0; i < 50; ++i) {
    const Point a{n(rng), n(rng), n(rng)}, b{n(rng), n(rng), n(rng)}, c{n(rng), n(rng), n(rng)};
    expect_near(h.compose(h.compose(a, b), c), h.compose(a, h.compose(b, c)), 1e-12);
  }
  const Point x{1, 0, 0}, y{0, 1, 0};
  EXPECT_NE(h.compose(x, y), h.compose(y, x));
}

TEST(Carnot, DilationIsAutomorphismAndScalesGauge) {
  const auto h = GroupModel::heisenberg();
  const Point a{0.4, -0.3, 0.2}, b{-1.1, 0.5, 0.9};
  for (double l : {0.1, 0.5, 2.0, 7.0}) {
    expect_near(h.dilate(l, h.compose(a, b)), h.compose(h.dilate(l, a), h.dilate(l, b)), 1e-12);
    EXPECT_NEAR(h.gauge(h.dilate(l, a)), l * h.gauge(a), 1e-12);
  }
  expect_near(h.dilate(2.0, Point{1, 1, 1}), {2, 2, 4});
  EXPECT_THROW(h.dilate(-1.0, a), ConfigError);
}

TEST(Carnot, KoranyiGaugeValues) {
  const auto h = GroupModel::heisenberg();
  EXPECT_NEAR(h.gauge({1, 0, 0}), 1.0, 1e-15);
  EXPECT_NEAR(h.gauge({0, 0, 0.25}), 1.0, 1e-15);
  EXPECT_NEAR(h.gauge({0, 0, 1}), 2.0, 1e-15);
  EXPECT_EQ(h.gauge(h.identity()), 0.0);
}

TEST(Carnot, DistanceIsLeftInvariantAndSymmetric) {
  const auto h = GroupModel::heisenberg();
  const Point x{0.2, 0.1, -0.4}, y{-0.7, 1.3, 0.25}, w{3, -2, 1};
  EXPECT_NEAR(h.distance(h.compose(w, x), h.compose(w, y)), h.distance(x, y), 1e-12);
  EXPECT_NEAR(h.distance(x, y), h.distance(y, x), 1e-12);
}

TEST(Carnot, BallVolumes) {
  EXPECT_NEAR(GroupModel::euclidean(1).unit_ball_volume(), 2.0, 1e-15);
  EXPECT_NEAR(GroupModel::euclidean(2).unit_ball_volume(), std::numbers::pi, 1e-15);
  EXPECT_NEAR(GroupModel::euclidean(3).unit_ball_volume(), 4.0 * std::numbers::pi / 3.0, 1e-14);
  const auto h = GroupModel::heisenberg();
  EXPECT_EQ(h.homogeneous_dimension(), 4);
  EXPECT_EQ(h.topological_dimension(), 3);
  EXPECT_NEAR(h.unit_ball_volume(), std::numbers::pi * std::numbers::pi / 8.0, 1e-15);
  EXPECT_NEAR(h.ball_volume(2.0), 16.0 * h.unit_ball_volume(), 1e-13);
}

TEST(Carnot, HeisenbergBallVolumeByMonteCarlo) {
  // Box [-1,1]^2 x [-1/4,1/4] contains the unit gauge ball.
  const auto h = GroupModel::heisenberg();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 400000;
  int in = 0;
  for (int i = 0; i < n; ++i) in += h.gauge({u(rng), u(rng), 0.25 * u(rng)}) < 1.0;
  const double vol = 2.0 * in / n;
  EXPECT_NEAR(vol, h.unit_ball_volume(), 0.01);
}

TEST(Carnot, ParabolicDistance) {
  const auto m = GroupModel::euclidean(1);
  EXPECT_NEAR(m.parabolic_distance({{1.0}, 0.0}, {{0.0}, 0.0}), 1.0, 1e-15);
  EXPECT_NEAR(m.parabolic_distance({{0.0}, 1.0}, {{0.0}, 0.0}), 1.0, 1e-15);
  const auto h = GroupModel::heisenberg();
  const SpaceTimePoint a{{0.3, 0.1, 0.2}, 0.5}, b{{-0.2, 0.4, 0.0}, -0.1};
  EXPECT_NEAR(h.parabolic_distance(h.dilate(3.0, a), h.dilate(3.0, b)), 3.0 * h.parabolic_distance(a, b), 1e-12);
}

TEST(Carnot, Errors) {
  const auto h = GroupModel::heisenberg();
  EXPECT_THROW(h.compose({1, 2}, {1, 2, 3}), ConfigError);
  EXPECT_THROW(GroupModel::euclidean(4), ConfigError);
  EXPECT_THROW(GroupModel::from_name("sphere"), ConfigError);
  EXPECT_THROW(h.ball_volume(0.0), ConfigError);
  EXPECT_EQ(GroupModel::from_name("h1"), h);
  EXPECT_EQ(GroupModel::from_name("euclidean2"), GroupModel::euclidean(2));
}
