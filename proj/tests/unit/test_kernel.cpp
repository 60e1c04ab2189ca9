#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "hypowiener/error.hpp"
#include "hypowiener/kernel.hpp"

using namespace hypowiener;

namespace {

// (|w|^2, z, log p_1) computed independently with mpmath at 30 digits.
constexpr double kOracles[][3] = {
    {0, 0, -2.7725887222397812},   {2, 0.7, -4.1600187791233175},  {1, 0, -3.2345752186152286},
    {10, 0, -6.2505030187043035},  {0, 3, -10.811233714412349},    {4, 2, -6.5524975777773944},
    {30, 0.5, -11.793883503841246}, {0.5, 6, -18.808687551661116},
};

std::string read(const std::string& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Kernel, EuclideanClosedForm) {
  const HeatKernel k(GroupModel::euclidean(1));
  EXPECT_NEAR(k({{0.0}, 1.0}, {{0.0}, 0.0}), 0.28209479177387814, 1e-15);
  EXPECT_EQ(k({{0.0}, 0.0}, {{0.0}, 1.0}), 0.0);
  EXPECT_EQ(k.log_gamma({{0.0}, 0.0}, {{0.0}, 0.0}), -std::numeric_limits<double>::infinity());
  const HeatKernel k2(GroupModel::euclidean(2));
  EXPECT_NEAR(k2({{1.0, 1.0}, 2.0}, {{0.0, 0.0}, 1.0}), std::exp(-0.5) / (4 * std::numbers::pi), 1e-15);
}

TEST(Kernel, HeisenbergProfileMatchesOracles) {
  QuadratureConfig cfg;
  for (const auto& o : kOracles) {
    const KernelValue v = heisenberg_log_p1(o[0], o[1], cfg);
    EXPECT_NEAR(v.log_value, o[2], 1e-9) << "w2=" << o[0] << " z=" << o[1];
    EXPECT_LT(v.rel_error, 1e-6);
  }
}

TEST(Kernel, HeisenbergVerticalAxisIsSech2) {
  QuadratureConfig cfg;
  for (double z : {0.0, 1.0, 5.0, 20.0}) {
    const double exact = std::log(1.0 / 16.0) - 2.0 * std::log(std::cosh(std::numbers::pi * z / 2.0));
    EXPECT_NEAR(heisenberg_log_p1(0.0, z, cfg).log_value, exact, 1e-9) << z;
  }
}

TEST(Kernel, HeisenbergFarField) {
  QuadratureConfig cfg;
  // Horizontal tail ~ exp(-|w|^2/4) up to polynomial factors.
  const double a = heisenberg_log_p1(1000.0, 0.0, cfg).log_value;
  const double b = heisenberg_log_p1(1e4, 0.0, cfg).log_value;
  EXPECT_TRUE(std::isfinite(a) && std::isfinite(b));
  EXPECT_NEAR((a - b) / 9000.0, 0.25, 0.01);
}

TEST(Kernel, HeisenbergHomogeneity) {
  const HeatKernel k(GroupModel::heisenberg());
  const auto& m = k.model();
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int i = 0; i < 10; ++i) {
    const SpaceTimePoint z{{n(rng), n(rng), n(rng)}, 1.0 + std::abs(n(rng))};
    const SpaceTimePoint zeta{{n(rng), n(rng), n(rng)}, 0.0};
    for (double l : {0.5, 3.0}) {
      const double lhs = k.log_gamma(m.dilate(l, z), m.dilate(l, zeta));
      EXPECT_NEAR(lhs, k.log_gamma(z, zeta) - 4.0 * std::log(l), 1e-8);
    }
  }
}

TEST(Kernel, HeisenbergSymmetries) {
  const HeatKernel k(GroupModel::heisenberg());
  // Rotation invariance in the horizontal plane and z -> -z.
  const double a = k.log_local({1.0, 0.0, 0.3}, 0.7);
  EXPECT_NEAR(k.log_local({0.0, 1.0, 0.3}, 0.7), a, 1e-12);
  EXPECT_NEAR(k.log_local({std::sqrt(0.5), -std::sqrt(0.5), -0.3}, 0.7), a, 1e-12);
}

TEST(Kernel, MemoIsTransparent) {
  QuadratureConfig plain, memo;
  memo.memoize = true;
  const HeatKernel a(GroupModel::heisenberg(), plain), b(GroupModel::heisenberg(), memo);
  const Point g{0.3, -0.2, 0.1};
  const double first = b.log_local(g, 0.5);
  EXPECT_EQ(first, a.log_local(g, 0.5));
  EXPECT_EQ(b.log_local(g, 0.5), first);
  EXPECT_GT(shared_kernel_memo()->size(), 0u);
}

TEST(Kernel, GaussianSurrogate) {
  const auto m = GroupModel::euclidean(1);
  EXPECT_NEAR(gaussian_G(m, 0.25, {{1.0}, 1.0}, {{0.0}, 0.0}), std::exp(-0.25) / 2.0, 1e-15);
  EXPECT_EQ(gaussian_G(m, 0.25, {{1.0}, 0.0}, {{0.0}, 1.0}), 0.0);
}

TEST(Kernel, EuclideanNormalizationAndChapman) {
  for (int n : {1, 2}) {
    const HeatKernel k(GroupModel::euclidean(n));
    const Point x = Point::zeros(n);
    const auto e = normalization_check(k, x, 0.7, 0.2, {});
    EXPECT_NEAR(e.value, 1.0, 1e-9);
    Point y = Point::zeros(n);
    y[0] = 0.4;
    const auto ck = chapman_kolmogorov_check(k, {x, 1.0}, 0.5, {y, 0.0}, {});
    EXPECT_LT(ck.value, 1e-6);
  }
}

TEST(Kernel, HeisenbergNormalizationMonteCarlo) {
  const HeatKernel k(GroupModel::heisenberg());
  IntegrationBudget b;
  b.mc_samples = 20000;
  b.seed = 3;
  const auto e = normalization_check(k, {0.1, 0.2, 0.3}, 1.0, 0.5, b);
  EXPECT_NEAR(e.value, 1.0, std::max(3.0 * e.error, 0.02));
}

TEST(Kernel, EuclideanBoundConstantsExact) {
  for (int n : {1, 2, 3}) {
    const HeatKernel k(GroupModel::euclidean(n));
    const BoundConstants fit = fit_gaussian_bounds(k, {});
    const BoundConstants exact = euclidean_bound_constants(n);
    EXPECT_NEAR(fit.a0, 0.25, 1e-10);
    EXPECT_NEAR(fit.b0, 0.25, 1e-10);
    EXPECT_NEAR(fit.lambda, exact.lambda, 1e-10);
    const double c = k.model().unit_ball_volume() * std::pow(4 * std::numbers::pi, -0.5 * n);
    EXPECT_NEAR(exact.lambda, std::max(c, 1.0 / c), 1e-12);
    EXPECT_LE(sandwich_violation(k, fit, bound_sample_points(k.model(), {})), 1.0 + 1e-12);
  }
}

TEST(Kernel, HeisenbergBoundsFileIsConsistent) {
  const std::string text = read(std::string(HYPOWIENER_DATA_DIR) + "/bounds_heisenberg.json");
  ASSERT_FALSE(text.empty());
  const BoundConstants bc = BoundConstants::from_json(text);
  EXPECT_EQ(bc.Q, 4.0);
  EXPECT_GT(bc.a0, 0.0);
  EXPECT_GE(bc.b0, bc.a0);
  EXPECT_GE(bc.lambda, 1.0);
  EXPECT_GE(bc.sample_size, 100000u);
  // The sandwich holds on a fresh off-grid sample.
  const HeatKernel k(GroupModel::heisenberg());
  std::vector<std::pair<Point, double>> pts;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n;
  for (int i = 0; i < 200; ++i) pts.push_back({Point{n(rng), n(rng), 0.5 * n(rng)}, std::exp(n(rng))});
  EXPECT_LE(sandwich_violation(k, bc, pts), 1.0 + 1e-9);
}

TEST(Kernel, SmallFitRecoversSandwichOnItsGrid) {
  const HeatKernel k(GroupModel::heisenberg());
  SampleSpec s;
  s.lag_count = 3;
  s.ratio_count = 9;
  s.direction_count = 4;
  const BoundConstants bc = fit_gaussian_bounds(k, s);
  EXPECT_LE(sandwich_violation(k, bc, bound_sample_points(k.model(), s)), 1.0 + 1e-12);
  const BoundConstants back = BoundConstants::from_json(bc.to_json());
  EXPECT_EQ(back.a0, bc.a0);
  EXPECT_EQ(back.sample_spec_hash, s.hash());
}

TEST(Kernel, Errors) {
  EXPECT_THROW(BoundConstants::from_json("{\"a0\": 1}"), ConfigError);
  const HeatKernel k(GroupModel::euclidean(1));
  EXPECT_THROW(normalization_check(k, {0.0}, 0.0, 1.0, {}), ConfigError);
}
