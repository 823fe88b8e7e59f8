#pragma once

#include <cstdint>

namespace rpz {

// splitmix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Identifies one coefficient draw. Same provenance always reproduces the
// same values, on any thread, in any call order.
struct SeedProvenance {
  std::uint64_t master = 0;
  int degree = 0;
  long trial = 0;
  int redraw = 0;
};

// Stream seed recurrence:
//   s = mix64(mix64(mix64(mix64(master) ^ degree) ^ trial) ^ redraw)
constexpr std::uint64_t stream_seed(const SeedProvenance& p) {
  std::uint64_t s = mix64(p.master);
  s = mix64(s ^ static_cast<std::uint64_t>(p.degree));
  s = mix64(s ^ static_cast<std::uint64_t>(p.trial));
  s = mix64(s ^ static_cast<std::uint64_t>(p.redraw));
  return s;
}

// splitmix64 sequence generator.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in (0,1]; safe as a log() argument.
  double uniform_pos() {
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }

  bool coin() { return (next() >> 63) != 0; }

 private:
  std::uint64_t state_;
};

}  // namespace rpz
