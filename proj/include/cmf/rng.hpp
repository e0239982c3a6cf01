#pragma once

#include <cmath>
#include <cstdint>

namespace cmf {

// Purpose tag of a keyed draw. Each (stream, replicate, time, a, b, draw)
// tuple addresses exactly one value, so results never depend on evaluation
// order or worker count. Streams are used homogeneously: a given key space
// yields either uniforms or normals, never both.
enum class Stream : std::uint64_t {
  kInitLatent = 1,   // normals: (replicate, 0, agent, coordinate)
  kLatentNoise = 2,  // normals: (replicate, step, agent, coordinate)
  kEdgeUniform = 3,  // uniforms: (replicate, time, min(i,j), max(i,j))
  kMcVertex = 4,     // uniforms: Monte-Carlo vertex draws (context, draw, slot)
  kCutNorm = 5,      // uniforms: cut-norm heuristic restarts
  kAux = 6,          // uniforms: miscellaneous test plumbing
};

// Replicate id reserved for reference-measure construction so it never
// collides with data replicates.
inline constexpr std::uint64_t kReferenceReplicate = std::uint64_t{1} << 40;

// Counter-based keyed generator: a chain of splitmix64 finalizers absorbing
// the key words. Stateless; every draw is a pure function of (seed, key).
class KeyedRng {
 public:
  explicit KeyedRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits(Stream stream, std::uint64_t replicate, std::uint64_t time,
                     std::uint64_t a, std::uint64_t b, std::uint64_t draw = 0) const {
    std::uint64_t h = mix(seed_ ^ 0x243f6a8885a308d3ull);
    h = mix(h ^ (kGolden * static_cast<std::uint64_t>(stream) + 0xd1b54a32d192ed03ull));
    h = mix(h ^ (kGolden * replicate + 0x8cb92ba72f3d8dd7ull));
    h = mix(h ^ (kGolden * time + 0xaef17502108ef2d9ull));
    h = mix(h ^ (kGolden * a + 0x9216d5d98979fb1bull));
    h = mix(h ^ (kGolden * b + 0xca262b26c5615e4dull));
    h = mix(h ^ (kGolden * draw + 0x6a09e667f3bcc909ull));
    return h;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform(Stream stream, std::uint64_t replicate, std::uint64_t time,
                 std::uint64_t a, std::uint64_t b, std::uint64_t draw = 0) const {
    return static_cast<double>(bits(stream, replicate, time, a, b, draw) >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller on two sub-draws of the key's draw space.
  double normal(Stream stream, std::uint64_t replicate, std::uint64_t time,
                std::uint64_t a, std::uint64_t b, std::uint64_t draw = 0) const {
    const std::uint64_t base = kNormalDrawBase + 2 * draw;
    const double u1 =
        static_cast<double>((bits(stream, replicate, time, a, b, base) >> 11) + 1) * 0x1.0p-53;
    const double u2 =
        static_cast<double>(bits(stream, replicate, time, a, b, base + 1) >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  // Uniform integer in [0, n), n >= 1.
  std::uint64_t index(Stream stream, std::uint64_t replicate, std::uint64_t time,
                      std::uint64_t a, std::uint64_t b, std::uint64_t n) const {
    const std::uint64_t i =
        static_cast<std::uint64_t>(uniform(stream, replicate, time, a, b) * static_cast<double>(n));
    return i >= n ? n - 1 : i;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
  static constexpr std::uint64_t kNormalDrawBase = std::uint64_t{1} << 62;
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  static std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
  }

  std::uint64_t seed_;
};

}  // namespace cmf
