#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "kintegra/rng.hpp"

using kintegra::PhiloxRng;

TEST_CASE("keyed block reproduces the published 10-round vectors") {
  auto r0 = PhiloxRng::block({0u, 0u, 0u, 0u}, {0u, 0u});
  CHECK(r0[0] == 0x6627e8d5u);
  CHECK(r0[1] == 0xe169c58du);
  CHECK(r0[2] == 0xbc57ac4cu);
  CHECK(r0[3] == 0x9b00dbd8u);

  auto r1 = PhiloxRng::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                             {0xffffffffu, 0xffffffffu});
  CHECK(r1[0] == 0x408f276du);
  CHECK(r1[1] == 0x41c83b0eu);
  CHECK(r1[2] == 0xa20bc7c6u);
  CHECK(r1[3] == 0x6d5451fdu);

  auto r2 = PhiloxRng::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                             {0xa4093822u, 0x299f31d0u});
  CHECK(r2[0] == 0xd16cfe09u);
  CHECK(r2[1] == 0x94fdccebu);
  CHECK(r2[2] == 0x5001e420u);
  CHECK(r2[3] == 0x24126ea1u);
}

TEST_CASE("same seed and stream replay the same sequence") {
  PhiloxRng a(42, 3), b(42, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u32() == b.next_u32());
}

TEST_CASE("streams with a shared seed do not collide") {
  PhiloxRng a(42, 0), b(42, 1);
  int same = 0;
  for (int i = 0; i < 64; ++i) same += a.next_u32() == b.next_u32();
  CHECK(same == 0);
}

TEST_CASE("distinct seeds give distinct sequences") {
  PhiloxRng a(1, 0), b(2, 0);
  int same = 0;
  for (int i = 0; i < 64; ++i) same += a.next_u32() == b.next_u32();
  CHECK(same == 0);
}

TEST_CASE("uniform01 stays in [0,1) and fills the range") {
  PhiloxRng rng(7);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("uniform maps into the requested interval") {
  PhiloxRng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(-2.0, 5.0);
    CHECK(u >= -2.0);
    CHECK(u < 5.0);
  }
}

TEST_CASE("normal samples have unit-ish moments") {
  PhiloxRng rng(3);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    CHECK(std::isfinite(z));
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("next_u64 combines two lanes deterministically") {
  PhiloxRng a(9, 2);
  PhiloxRng b(9, 2);
  std::vector<std::uint64_t> seen;
  for (int i = 0; i < 8; ++i) seen.push_back(a.next_u64());
  for (int i = 0; i < 8; ++i) CHECK(b.next_u64() == seen[i]);
  CHECK(std::set<std::uint64_t>(seen.begin(), seen.end()).size() == seen.size());
}
