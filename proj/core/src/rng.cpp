#include "cavityxy/rng.hpp"

#include <cmath>

namespace cavityxy {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return mix64(mix64(mix64(seed_) ^ stream_) ^ counter);
}

double CounterRng::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::below(std::uint64_t counter, std::uint64_t n) const {
  // Multiply-shift; bias is below 2^-64 * n and irrelevant here.
  const __uint128_t prod = static_cast<__uint128_t>(bits(counter)) * n;
  return static_cast<std::uint64_t>(prod >> 64);
}

double CounterRng::normal(std::uint64_t counter) const {
  const CounterRng sub(seed_, mix64(stream_ ^ 0x6e6f726d616cULL));
  double u1 = sub.uniform(2 * counter);
  const double u2 = sub.uniform(2 * counter + 1);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace cavityxy
