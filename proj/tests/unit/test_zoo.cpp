#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

#include "hypowiener/error.hpp"
#include "hypowiener/zoo.hpp"
#include "json.hpp"

using namespace hypowiener;

namespace {
BoundConstants h1_bounds() {
  std::ifstream in(std::string(HYPOWIENER_DATA_DIR) + "/bounds_heisenberg.json");
  return BoundConstants::from_json(std::string(std::istreambuf_iterator<char>(in), {}));
}

ZooConfig small(std::uint64_t seed) {
  ZooConfig z;
  z.seed = seed;
  z.h1_bounds = h1_bounds();
  z.volume_samples = 20000;
  z.balayage_paths = 300;
  z.probe_sim.n_paths = 400;
  z.only = {"punctured_slab_e1", "half_space_e1"};
  return z;
}
}  // namespace

TEST(Zoo, FixtureList) {
  const auto f = zoo_fixtures(h1_bounds());
  ASSERT_EQ(f.size(), 7u);
  EXPECT_EQ(f[4].name, "loglog_h1_halfCstar");
  EXPECT_NEAR(f[4].domain.param("C"), 0.5 * critical_C(h1_bounds()), 1e-15);
  for (const auto& fx : f)
    for (const auto& [cell, kind] : fx.expected)
      EXPECT_NE(std::find(fx.cells.begin(), fx.cells.end(), cell), fx.cells.end()) << fx.name << " " << cell;
}

TEST(Zoo, SmallRunAgreesAndReproduces) {
  const ZooReport a = run_zoo(small(5));
  EXPECT_TRUE(a.all_agree()) << a.to_json();
  EXPECT_EQ(a.cells.size(), 14u);
  const ZooReport b = run_zoo(small(5));
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  for (std::size_t i = 0; i < a.cells.size(); ++i) EXPECT_EQ(a.cells[i].detail, b.cells[i].detail);
  const auto j = nlohmann::json::parse(a.to_json());
  EXPECT_EQ(j["domain_hashes"].size(), 2u);
  EXPECT_TRUE(j["all_agree"].get<bool>());
  const ZooReport c = run_zoo(small(6));
  EXPECT_NE(a.fingerprint(), c.fingerprint());
  for (std::size_t i = 0; i < a.cells.size(); ++i) EXPECT_EQ(a.cells[i].verdict.kind, c.cells[i].verdict.kind);
}

TEST(Zoo, RequiresHeisenbergConstants) {
  ZooConfig z;
  EXPECT_THROW(run_zoo(z), ConfigError);
}
