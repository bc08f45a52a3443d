#pragma once

#include <cstdint>
#include <random>

namespace mono3d::rng {

/// splitmix64 step; used to derive independent sub-seeds so parallel
/// schedules cannot change results.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x9e3779b97f4a7c15ULL));
}

inline std::mt19937_64 engine(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace mono3d::rng
