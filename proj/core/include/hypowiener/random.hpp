#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>
#include <thread>
#include <vector>

namespace hypowiener {

/// Counter-based generator: output i of stream (seed, stream) is a fixed
/// mixing function of (key, i), so every path or sample owns an independent,
/// reproducible stream regardless of which worker runs it.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal.
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);
/// Stable 64-bit hash of a byte string (FNV-1a followed by a final mix).
std::uint64_t hash_bytes(const void* data, std::size_t size);
std::uint64_t hash_string(const std::string_view s);

/// Process-wide cap on worker threads (the --jobs flag). 0 means hardware concurrency.
void set_worker_count(unsigned jobs);
unsigned worker_count();

/// Runs fn(block_index, begin, end) for fixed-size blocks of [0, n) and returns
/// the per-block results in block order. Block boundaries depend only on n and
/// block_size, so any associative reduction over the returned vector is
/// independent of the number of workers.
template <class Result, class Fn>
std::vector<Result> map_blocks(std::size_t n, std::size_t block_size, Fn&& fn) {
  const std::size_t blocks = block_size == 0 ? 0 : (n + block_size - 1) / block_size;
  std::vector<Result> out(blocks);
  const unsigned workers = std::min<std::size_t>(worker_count(), blocks == 0 ? 1 : blocks);
  auto run = [&](unsigned w) {
    for (std::size_t b = w; b < blocks; b += workers) {
      const std::size_t begin = b * block_size;
      const std::size_t end = std::min(n, begin + block_size);
      out[b] = fn(b, begin, end);
    }
  };
  if (workers <= 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  return out;
}

}  // namespace hypowiener
