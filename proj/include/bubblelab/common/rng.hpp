#pragma once

#include <cstdint>
#include <random>

namespace bubblelab {

/// Exact rational probability num/den with 0 <= num <= den.
struct Probability {
  std::int64_t num = 1;
  std::int64_t den = 2;

  /// Nearest multiple of 1e-9, reduced.
  static Probability from_double(double p);
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  bool valid() const noexcept { return den > 0 && num >= 0 && num <= den; }

  friend bool operator==(const Probability& a, const Probability& b) noexcept {
    return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
  }
};

/// Seeded 64-bit Mersenne Twister with distribution helpers that do not
/// depend on the standard library's implementation-defined distributions,
/// so draws are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// One draw; true with probability exactly p.num / p.den.
  bool bernoulli(const Probability& p);

  /// Uniform integer in [lo, hi], rejection sampled.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace bubblelab
