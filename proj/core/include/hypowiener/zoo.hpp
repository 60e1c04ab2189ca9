#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypowiener/criteria.hpp"

namespace hypowiener {

/// One domain of the verdict matrix and the verdicts it must produce.
struct ZooFixture {
  std::string name;
  Domain domain;
  std::map<std::string, VerdictKind> expected;  // cell name -> required verdict
  std::vector<std::string> cells;              // cells to run, in order
};

struct ZooConfig {
  std::uint64_t seed = 1;
  double lambda = 0.5;
  int K = 40;
  std::size_t volume_samples = 100000;
  std::size_t geometric_samples = 4000;
  std::size_t balayage_paths = 2000;
  std::size_t balayage_paths_h1 = 400;
  int balayage_K = 12;
  SimConfig probe_sim = probe_defaults();
  ProbeConfig probe;
  BoundConstants h1_bounds;  // fitted Heisenberg constants (C* and envelopes)
  std::vector<std::string> only;  // fixture names; empty runs all

  static SimConfig probe_defaults() {
    SimConfig c;
    c.dt = 0.05;
    c.n_paths = 2000;
    c.dt_relative = 0.05;
    c.dt_min = 1e-12;
    c.max_steps = 200000;
    return c;
  }
  std::string to_json() const;
};

struct ZooCell {
  std::string fixture;
  std::string criterion;
  Verdict verdict;
  std::optional<VerdictKind> expected;
  bool agrees = true;  // true when no expectation is recorded
  std::uint64_t seed = 0;
  double seconds = 0.0;
  std::string detail;            // JSON of the underlying report
  std::uint64_t fingerprint = 0; // hash of detail; timing excluded
};

struct ZooReport {
  std::vector<ZooCell> cells;
  std::map<std::string, std::uint64_t> domain_hashes;
  double seconds = 0.0;
  std::uint64_t seed = 0;

  bool all_agree() const;
  /// Order-sensitive hash of every cell's verdict and fingerprint.
  std::uint64_t fingerprint() const;
  std::string to_json(bool with_detail = false) const;
};

/// The five fixture families of the acceptance matrix (six domains) plus one
/// unchecked domain inside the open range of C.
std::vector<ZooFixture> zoo_fixtures(const BoundConstants& h1_bounds);

ZooReport run_zoo(const ZooConfig& cfg);

}  // namespace hypowiener
