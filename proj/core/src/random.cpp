#include "hypowiener/random.hpp"

#include <atomic>
#include <boost/random/normal_distribution.hpp>
#include <string_view>

namespace hypowiener {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
std::atomic<unsigned> g_jobs{0};
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t hash_bytes(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

std::uint64_t hash_string(const std::string_view s) { return hash_bytes(s.data(), s.size()); }

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed + kGolden) ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL))) {}

CounterRng::result_type CounterRng::operator()() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(*this);
}

void set_worker_count(unsigned jobs) { g_jobs.store(jobs); }

unsigned worker_count() {
  const unsigned j = g_jobs.load();
  if (j != 0) return j;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace hypowiener
