#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "comonet/random.hpp"

using comonet::RandomStream;

TEST_CASE("same seed, same stream") {
  RandomStream a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived streams are stable and differ per consumer") {
  auto a = RandomStream::derive(7, "link");
  auto b = RandomStream::derive(7, "link");
  auto c = RandomStream::derive(7, "gsm");
  auto d = RandomStream::derive(8, "link");
  CHECK(a.seed() == b.seed());
  CHECK(a.seed() != c.seed());
  CHECK(a.seed() != d.seed());
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform_int covers its closed range and nothing else") {
  RandomStream r(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = r.uniform_int(-3, 3);
    REQUIRE(v >= -3);
    REQUIRE(v <= 3);
    ++hits[static_cast<std::size_t>(v + 3)];
  }
  // Each bucket is Binomial(70000, 1/7): mean 10000, sd ~ 90.6.
  for (int h : hits) CHECK(std::abs(h - 10000) < 5 * 91);
  CHECK(r.uniform_int(5, 5) == 5);
}

TEST_CASE("uniform01 stays in [0, 1) and bernoulli matches its rate") {
  RandomStream r(11);
  const int n = 100000;
  int yes = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    if (r.bernoulli(0.25)) ++yes;
  }
  const double sd = std::sqrt(n * 0.25 * 0.75);
  CHECK(std::abs(yes - n * 0.25) < 4 * sd);
  RandomStream z(1);
  for (int i = 0; i < 100; ++i) {
    CHECK_FALSE(z.bernoulli(0.0));
    CHECK(z.bernoulli(1.0));
  }
}
