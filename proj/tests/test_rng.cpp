#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "smallnoise/rng.hpp"

using namespace smallnoise;

TEST_SUITE_BEGIN("rng");

// Published known-answer vectors for Philox 4x32 with 10 rounds. Inputs are
// ctr[0..3] then key[0..1], in array index order.
TEST_CASE("philox known answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;

  const A4 zero = rng::Philox4x32::encrypt(A4{0, 0, 0, 0}, A2{0, 0});
  CHECK(zero == A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

  const A4 ones = rng::Philox4x32::encrypt(
      A4{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
      A2{0xffffffffu, 0xffffffffu});
  CHECK(ones == A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

  const A4 pi = rng::Philox4x32::encrypt(
      A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
      A2{0xa4093822u, 0x299f31d0u});
  CHECK(pi == A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("unit interval mappings stay inside their ranges") {
  CHECK(rng::to_open_unit(0) > 0.0);
  CHECK(rng::to_open_unit(~std::uint64_t(0)) == 1.0);
  CHECK(rng::to_unit(0) == 0.0);
  CHECK(rng::to_unit(~std::uint64_t(0)) < 1.0);
}

TEST_CASE("normal draws have standard moments") {
  const int n = 200000;
  std::vector<double> x(n);
  rng::fill_normals(42, rng::Stream::scratch, 0, 0, x.data(), n);

  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    m1 += v;
    m2 += v * v;
    m3 += v * v * v;
    m4 += v * v * v * v;
  }
  m1 /= n;
  m2 /= n;
  m3 /= n;
  m4 /= n;

  // 5-sigma bands for the sampling error of each moment at this n.
  CHECK(std::abs(m1) < 5.0 / std::sqrt(double(n)));
  CHECK(std::abs(m2 - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(m3) < 5.0 * std::sqrt(15.0 / n));
  CHECK(std::abs(m4 - 3.0) < 5.0 * std::sqrt(96.0 / n));
}

TEST_CASE("draws are pure functions of the counter") {
  std::array<double, 8> a{}, b{};
  rng::fill_normals(7, rng::Stream::transition, 3, 11, a.data(), 8);
  rng::fill_normals(7, rng::Stream::transition, 3, 11, b.data(), 8);
  CHECK(a == b);

  // A shorter fill is a prefix of a longer one at the same coordinates.
  std::array<double, 3> head{};
  rng::fill_normals(7, rng::Stream::transition, 3, 11, head.data(), 3);
  CHECK(head[0] == a[0]);
  CHECK(head[1] == a[1]);
  CHECK(head[2] == a[2]);
}

TEST_CASE("distinct coordinates give distinct draws") {
  double base = 0, other = 0;
  rng::fill_normals(7, rng::Stream::transition, 3, 11, &base, 1);

  rng::fill_normals(8, rng::Stream::transition, 3, 11, &other, 1);
  CHECK(base != other);
  rng::fill_normals(7, rng::Stream::initial_draw, 3, 11, &other, 1);
  CHECK(base != other);
  rng::fill_normals(7, rng::Stream::transition, 4, 11, &other, 1);
  CHECK(base != other);
  rng::fill_normals(7, rng::Stream::transition, 3, 12, &other, 1);
  CHECK(base != other);

  // Path ids above 2^32 must not alias small ids through truncation.
  rng::fill_normals(7, rng::Stream::transition, (std::uint64_t(1) << 32) | 3,
                    11, &other, 1);
  CHECK(base != other);
}

TEST_SUITE_END();
