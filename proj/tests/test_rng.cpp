#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "raradapt/rng.hpp"

using namespace raradapt;

TEST_CASE("streams are reproducible and keyed") {
  RngStream a = RngStream::keyed(42, 7, StreamKind::Trial);
  RngStream b = RngStream::keyed(42, 7, StreamKind::Trial);
  RngStream c = RngStream::keyed(42, 8, StreamKind::Trial);
  RngStream d = RngStream::keyed(42, 7, StreamKind::Auxiliary);
  bool same = true, differs_rep = false, differs_kind = false;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t x = a.next_u64();
    same &= x == b.next_u64();
    differs_rep |= x != c.next_u64();
    differs_kind |= x != d.next_u64();
  }
  CHECK(same);
  CHECK(differs_rep);
  CHECK(differs_kind);
}

TEST_CASE("uniform01 range and moments") {
  RngStream rng(123);
  double sum = 0.0, sumsq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  CHECK(std::fabs(sum / n - 0.5) < 0.005);
  CHECK(std::fabs(sumsq / n - 1.0 / 3.0) < 0.005);
}

TEST_CASE("uniform_int stays in range and is roughly uniform") {
  RngStream rng(5);
  std::array<int, 7> counts{};
  const int n = 70000;
  for (int i = 0; i < n; ++i) counts[rng.uniform_int(7)]++;
  for (int c : counts) CHECK(std::fabs(c - n / 7.0) < 5.0 * std::sqrt(n / 7.0));
  CHECK_THROWS(rng.uniform_int(0));
}

TEST_CASE("normal moments") {
  RngStream rng(99);
  double sum = 0.0, sumsq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(n));
  CHECK(std::fabs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("categorical inverts the cdf") {
  const std::vector<double> probs{0.2, 0.0, 0.5, 0.3};
  RngStream rng(2024);
  std::array<long, 4> counts{};
  const int n = 50000;
  for (int i = 0; i < n; ++i) counts[rng.categorical(probs)]++;
  CHECK(counts[1] == 0);
  CHECK(std::fabs(counts[0] / double(n) - 0.2) < 0.01);
  CHECK(std::fabs(counts[2] / double(n) - 0.5) < 0.01);
  CHECK(std::fabs(counts[3] / double(n) - 0.3) < 0.01);
}

TEST_CASE("shuffle preserves the multiset") {
  std::vector<int> values{1, 1, 1, 2, 2, 3};
  RngStream rng(7);
  rng.shuffle(std::span<int>(values));
  int ones = 0, twos = 0, threes = 0;
  for (int v : values) {
    ones += v == 1;
    twos += v == 2;
    threes += v == 3;
  }
  CHECK(ones == 3);
  CHECK(twos == 2);
  CHECK(threes == 1);
}
