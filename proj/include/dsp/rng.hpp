#pragma once

#include <cstdint>
#include <random>

namespace dsp {

// Deterministic seedable generator. All randomness in the library flows
// through this class. The raw engine (mt19937_64) has a standard-specified
// sequence, and the distributions are implemented here rather than taken
// from <random>, so identical seeds give identical streams on every
// platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform01() * static_cast<double>(hi - lo + 1));
  }

  // Standard normal via Box-Muller with a cached spare.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Child-stream derivation used wherever one root seed fans out into
// independent per-task streams: child_seed(root, k) feeds root and the
// stream index k through splitmix64. Documented because replaying a run
// from its manifest depends on this exact rule.
std::uint64_t child_seed(std::uint64_t root, std::uint64_t stream);

}  // namespace dsp
