// rng.hpp - deterministic per-replication random streams.  Every replication
// seeds its own generator from (master seed, replication index), so results
// do not depend on how work is split across threads.
#pragma once

#include <cstdint>
#include <random>

namespace trendratio::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Well-separated stream seed for one replication of one experiment cell.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t cell,
                                 std::uint64_t replication) {
  std::uint64_t s = splitmix64(master ^ 0xA5A5A5A5DEADBEEFull);
  s = splitmix64(s ^ splitmix64(cell + 0x1234ull));
  return splitmix64(s ^ splitmix64(replication + 0x9876ull));
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t cell,
                                   std::uint64_t replication) {
  return std::mt19937_64(stream_seed(master, cell, replication));
}

}  // namespace trendratio::detail
