#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ymu {

// Malformed user-facing input: bad files, bad label data, bad CLI values.
// The CLI maps this to exit code 1; anything else escaping is treated as an
// internal invariant failure (exit code 2).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Deterministic PRNG. std::uniform_real_distribution is not pinned down by
// the standard, so all sampling goes through explicit bit manipulation and
// gives identical streams on every platform.
class Rng64 {
 public:
  explicit Rng64(std::uint64_t seed) : state_(seed) {}

  // Independent per-sample stream derived from (master seed, sample index).
  static Rng64 for_sample(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t a = master_seed;
    std::uint64_t b = index + 0x632BE59BD9B4E019ull;
    std::uint64_t ha = splitmix64(a);
    std::uint64_t hb = splitmix64(b);
    return Rng64(ha ^ (hb + 0x9E3779B97F4A7C15ull + (ha << 6) + (ha >> 2)));
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1), 53 usable bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Unbiased integer in [0, n) via rejection.
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

 private:
  std::uint64_t state_;
};

// Banker's rounding, independent of the FPU rounding mode.
inline double round_half_even(double v) {
  const double f = std::floor(v);
  const double diff = v - f;
  if (diff > 0.5) return f + 1.0;
  if (diff < 0.5) return f;
  return std::fmod(f, 2.0) == 0.0 ? f : f + 1.0;
}

inline double sigmoid_scalar(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Axis-aligned box, corner form.
struct Box {
  float x1 = 0, y1 = 0, x2 = 0, y2 = 0;
};

}  // namespace ymu
