#pragma once

#include <cstdint>

namespace cavityxy {

// Counter-based random numbers: every draw is a pure function of (seed, stream, counter),
// so results do not depend on evaluation order or thread count.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter) const;
  // Uniform in [0, 1).
  double uniform(std::uint64_t counter) const;
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t counter, std::uint64_t n) const;
  // Standard normal; consumes counters 2*counter and 2*counter+1 of a derived stream.
  double normal(std::uint64_t counter) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

std::uint64_t mix64(std::uint64_t x);

// Stream identifiers so that different uses of one seed never overlap.
namespace streams {
inline constexpr std::uint64_t kAtomNumber = 0x4e756d626572ULL;
inline constexpr std::uint64_t kSiteIndex = 0x53697465ULL;
inline constexpr std::uint64_t kRadius = 0x526164697573ULL;
inline constexpr std::uint64_t kMotion = 0x4d6f74696f6eULL;
inline constexpr std::uint64_t kTest = 0x54657374ULL;
}  // namespace streams

}  // namespace cavityxy
