#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace roomopt {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed of a named substream ("init.primary", "init.zone.2", ...). Streams
/// are independent of each other, so adding restarts to one stage leaves
/// every other stage untouched.
inline std::uint64_t substream_seed(std::uint64_t master, std::string_view name, std::uint64_t index = 0) {
  return splitmix64(splitmix64(master) ^ fnv1a64(name) ^ splitmix64(index + 0x51ed2701ULL));
}

/// mt19937_64 with a portable uniform draw (the standard distributions are
/// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace roomopt
