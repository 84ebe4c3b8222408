#pragma once

#include <cstdint>
#include <random>

namespace pbicm {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent reproducible substream keyed by (seed, stream). Monte-Carlo
/// work is split into blocks and every block owns one stream, so results do
/// not depend on how blocks are scheduled onto threads.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(seed)),
                    static_cast<std::uint32_t>(splitmix64(seed) >> 32),
                    static_cast<std::uint32_t>(splitmix64(stream ^ 0x5bd1e995ULL)),
                    static_cast<std::uint32_t>(splitmix64(stream ^ 0x5bd1e995ULL) >> 32)};
  return Rng(seq);
}

}  // namespace pbicm
