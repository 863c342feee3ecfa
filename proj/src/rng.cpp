#include "hcrn/rng.hpp"

namespace hcrn {

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection keeps the result unbiased for any n.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return lo;
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(below(span));
}

std::uint64_t Rng::derive(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  Rng mix(base ^ 0xD1B54A32D192ED03ULL);
  std::uint64_t s = mix.next_u64();
  mix = Rng(s ^ (a * 0x9E3779B97F4A7C15ULL));
  s = mix.next_u64();
  mix = Rng(s ^ (b * 0xC2B2AE3D27D4EB4FULL));
  return mix.next_u64();
}

}  // namespace hcrn
