#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace smallnoise::rng {

// Philox 4x32 with 10 rounds, a keyed counter-based generator. A draw is a
// pure function of (key, counter), so noise consumed at (path p, step k) is
// the same no matter how the loop over paths is scheduled. Known-answer
// vectors for this algorithm are frozen in the test suite.
struct Philox4x32 {
  static constexpr std::uint32_t kMult0 = 0xD2511F53u;
  static constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> encrypt(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t prod0 = std::uint64_t(kMult0) * ctr[0];
      const std::uint64_t prod1 = std::uint64_t(kMult1) * ctr[2];
      const std::array<std::uint32_t, 4> next{
          std::uint32_t(prod1 >> 32) ^ ctr[1] ^ key[0],
          std::uint32_t(prod1),
          std::uint32_t(prod0 >> 32) ^ ctr[3] ^ key[1],
          std::uint32_t(prod0),
      };
      ctr = next;
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }
};

/// Stream tags keep the independent noise sources of the toolkit from
/// colliding even when they share a master seed, a path id and a step id.
enum class Stream : std::uint32_t {
  transition = 0,       // Euler-Maruyama increments, shared by all simulators
  initial_draw = 1,     // Gaussian initial conditions
  gaussian_sample = 2,  // direct sampling from a Gaussian measure
  residual_mc = 3,      // Monte Carlo linearization-residual expectations
  scratch = 4,          // free for tests and one-off experiments
};

inline double to_open_unit(std::uint64_t x) {
  // (0, 1]: safe under log()
  return double((x >> 11) + 1) * 0x1.0p-53;
}

inline double to_unit(std::uint64_t x) {
  // [0, 1)
  return double(x >> 11) * 0x1.0p-53;
}

/// Writes n standard normal draws determined by (seed, stream, id, step).
/// Each Philox block yields a Box-Muller pair; blocks advance through the
/// last counter word, which also carries the stream tag.
inline void fill_normals(std::uint64_t seed, Stream stream, std::uint64_t id,
                         std::uint32_t step, double* out, int n) {
  const std::array<std::uint32_t, 2> key{std::uint32_t(seed),
                                         std::uint32_t(seed >> 32)};
  const std::uint32_t tag = std::uint32_t(stream) << 24;
  for (int block = 0; 2 * block < n; ++block) {
    const std::array<std::uint32_t, 4> ctr{
        std::uint32_t(id), std::uint32_t(id >> 32), step,
        tag | std::uint32_t(block)};
    const auto r = Philox4x32::encrypt(ctr, key);
    const std::uint64_t a = std::uint64_t(r[0]) | (std::uint64_t(r[1]) << 32);
    const std::uint64_t b = std::uint64_t(r[2]) | (std::uint64_t(r[3]) << 32);
    const double radius = std::sqrt(-2.0 * std::log(to_open_unit(a)));
    const double angle = 6.283185307179586476925286766559 * to_unit(b);
    out[2 * block] = radius * std::cos(angle);
    if (2 * block + 1 < n) out[2 * block + 1] = radius * std::sin(angle);
  }
}

}  // namespace smallnoise::rng
