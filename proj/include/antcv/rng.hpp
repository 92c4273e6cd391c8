#pragma once

#include <cstdint>
#include <random>

namespace antcv {

// Seed descriptor: one independent substream per (seed, stream_id) pair.
// The same pair reproduces identical draws bit-for-bit on one platform.
namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  // Hash-derived child stream so nested substream() chains stay
  // disjoint across purposes.
  RngSpec substream(std::uint64_t offset) const {
    return RngSpec{seed, detail::splitmix64(stream_id ^
                                            (offset * 0xd1342543de82ef95ULL +
                                             0x2545f4914f6cdd1dULL))};
  }
};

// Engine seeded by mixing (seed, stream_id) so nearby values give
// unrelated streams.
inline std::mt19937_64 make_engine(const RngSpec& spec) {
  std::uint64_t s0 = detail::splitmix64(spec.seed);
  std::uint64_t s1 = detail::splitmix64(s0 ^ spec.stream_id);
  std::seed_seq seq{static_cast<std::uint32_t>(s1),
                    static_cast<std::uint32_t>(s1 >> 32),
                    static_cast<std::uint32_t>(s0),
                    static_cast<std::uint32_t>(s0 >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace antcv
