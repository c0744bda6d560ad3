#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace acci {

// Portable draws on top of mt19937_64. The standard distributions are
// implementation-defined, so generated corpora and initial weights would not
// be reproducible across standard libraries if we used them.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stable 64-bit hash (FNV-1a followed by a splitmix finalizer).
std::uint64_t stable_hash(std::string_view text, std::uint64_t seed = 0);

// Deterministic uniform value in [0, 1) keyed by (seed, text).
double keyed_uniform(std::uint64_t seed, std::string_view text);

}  // namespace acci
