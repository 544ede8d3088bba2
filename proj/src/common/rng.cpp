#include "bubblelab/common/rng.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bubblelab {

Probability Probability::from_double(double p) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) throw std::invalid_argument("probability must lie in [0, 1]");
  constexpr std::int64_t kScale = 1'000'000'000;
  auto num = static_cast<std::int64_t>(std::llround(p * static_cast<double>(kScale)));
  const auto g = std::gcd(num, kScale);
  return Probability{num / g, kScale / g};
}

bool Rng::bernoulli(const Probability& p) {
  const std::uint64_t u = next();
  // u / 2^64 < num / den  <=>  u * den < num * 2^64
  const auto lhs = static_cast<unsigned __int128>(u) * static_cast<unsigned __int128>(p.den);
  const auto rhs = static_cast<unsigned __int128>(p.num) << 64;
  return lhs < rhs;
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next());  // full 64-bit range
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t u = next();
  while (u >= limit) u = next();
  return lo + static_cast<std::int64_t>(u % span);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace bubblelab
