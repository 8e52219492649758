#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace bni {

// Stream labels used when deriving child seeds from a root seed.
namespace stream {
inline constexpr std::uint64_t network = 1;
inline constexpr std::uint64_t treatments = 2;
inline constexpr std::uint64_t outcomes = 3;
inline constexpr std::uint64_t sampling = 4;
inline constexpr std::uint64_t bootstrap = 5;
inline constexpr std::uint64_t dataset = 6;
}  // namespace stream

std::uint64_t splitmix64(std::uint64_t& state);

// Hashes a root seed and a path of counters into an independent child seed.
// derive_seed(s, {a, b}) depends only on (s, a, b), so per-replicate streams
// are identical whether replicates run serially or in parallel.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path);

// Engine plus distribution helpers with platform-independent output. The
// standard library distributions are implementation-defined, so the
// conversions are written out here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  bool bernoulli(double p) { return uniform() < p; }
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace bni
