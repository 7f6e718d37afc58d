#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "mismc/parallel.hpp"
#include "mismc/rng.hpp"

using namespace mismc;

TEST_SUITE_BEGIN("rng");

TEST_CASE("philox known-answer vectors") {
  // Reference vectors for philox4x32-10 (counter, key) -> block.
  std::uint32_t out[4];
  detail::philox4x32_block(0, 0, 0, out);
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);

  detail::philox4x32_block(0x85a308d3243f6a88ull, 0x0370734413198a2eull,
                           0x299f31d0a4093822ull, out);
  CHECK(out[0] == 0xd16cfe09u);
  CHECK(out[1] == 0x94fdccebu);
  CHECK(out[2] == 0x5001e420u);
  CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("stream determinism and child independence") {
  RngStream a(123);
  RngStream b(123);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());

  RngStream root(99);
  // Distinct derivation paths yield distinct streams.
  std::set<std::uint64_t> firsts;
  for (std::uint64_t t = 0; t < 2000; ++t) {
    RngStream c = root.child(t);
    firsts.insert(c());
  }
  for (std::uint64_t t = 0; t < 2000; ++t) {
    RngStream c = root.child({1, t});
    firsts.insert(c());
  }
  CHECK(firsts.size() == 4000);

  // child() does not perturb the parent.
  RngStream p(5), q(5);
  (void)p.child(17);
  CHECK(p() == q());
}

TEST_CASE("uniform01 moments and range") {
  RngStream r(2024);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    s += u;
    s2 += u * u;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::abs(mean - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(var - 1.0 / 12.0) < 1e-3);
}

TEST_CASE("normal moments") {
  RngStream r(55);
  const int n = 200000;
  double s = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
    s4 += x * x * x * x;
  }
  CHECK(std::abs(s / n) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(s2 / n - 1.0) < 3.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(s4 / n - 3.0) < 3.0 * std::sqrt(96.0 / n));
}

TEST_CASE("poisson mean and variance") {
  RngStream r(77);
  const double lambda = 17.3;
  const int n = 20000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k = static_cast<double>(r.poisson(lambda));
    s += k;
    s2 += k * k;
  }
  const double mean = s / n;
  CHECK(std::abs(mean - lambda) < 3.0 * std::sqrt(lambda / n));
  CHECK(std::abs((s2 / n - mean * mean) / lambda - 1.0) < 0.05);
}

TEST_CASE("uniform_below stays in range and is roughly uniform") {
  RngStream r(31);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t v = r.uniform_below(7);
    REQUIRE(v < 7);
    ++counts[static_cast<std::size_t>(v)];
  }
  for (int c : counts) CHECK(std::abs(c - n / 7) < 5 * std::sqrt(n / 7.0));
}

TEST_CASE("parallel_for writes slots independent of thread count") {
  const int n = 1000;
  auto fill = [&](std::vector<double>& out) {
    parallel_for(n, [&](std::int64_t i) {
      RngStream r = RngStream(42).child(static_cast<std::uint64_t>(i));
      out[static_cast<std::size_t>(i)] = r.normal();
    });
  };
  std::vector<double> serial(n), parallel(n);
  set_threads(1);
  fill(serial);
  set_threads(4);
  fill(parallel);
  set_threads(1);
  CHECK(serial == parallel);
}

TEST_CASE("parallel_for propagates exceptions") {
  CHECK_THROWS_AS(
      parallel_for(64, [](std::int64_t i) {
        if (i == 13) throw std::runtime_error("boom");
      }),
      std::runtime_error);
}

TEST_SUITE_END();
