#include <doctest.h>

#include <cmath>
#include <vector>

#include "vaxsde/random.hpp"

using namespace vaxsde;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("normal pairs are a pure function of seed, stream and step") {
  const RandomStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  CHECK(a.normal_pair(12) == b.normal_pair(12));
  CHECK(a.normal_pair(12) != c.normal_pair(12));
  CHECK(a.normal_pair(12) != d.normal_pair(12));
  CHECK(a.normal_pair(1ull << 33) != a.normal_pair(1));
}

TEST_CASE("normal pairs have standard moments and independent streams") {
  const std::size_t n = 200000;
  const RandomStream s0(2024, 0), s1(2024, 1);
  double m1 = 0, m2 = 0, m4 = 0, cross_pair = 0, cross_stream = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [z1, z2] = s0.normal_pair(i);
    const auto [w1, w2] = s1.normal_pair(i);
    m1 += z1 + z2;
    m2 += z1 * z1 + z2 * z2;
    m4 += z1 * z1 * z1 * z1 + z2 * z2 * z2 * z2;
    cross_pair += z1 * z2;
    cross_stream += z1 * w1;
  }
  const double N = static_cast<double>(n);
  CHECK(std::abs(m1 / (2 * N)) < 5.0 / std::sqrt(2 * N));
  CHECK(std::abs(m2 / (2 * N) - 1.0) < 5.0 * std::sqrt(2.0 / (2 * N)));
  CHECK(std::abs(m4 / (2 * N) - 3.0) < 5.0 * std::sqrt(96.0 / (2 * N)));
  CHECK(std::abs(cross_pair / N) < 5.0 / std::sqrt(N));
  CHECK(std::abs(cross_stream / N) < 5.0 / std::sqrt(N));
}
