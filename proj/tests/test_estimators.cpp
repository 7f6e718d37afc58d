#include <doctest.h>

#include <cmath>
#include <cstring>

#include "mismc/errors.hpp"
#include "mismc/estimators.hpp"
#include "test_support.hpp"

using namespace mismc;

TEST_SUITE_BEGIN("estimators");

TEST_CASE("single-index MISMC coincides with the single-level estimator") {
  const Toy1dModel toy = test::make_toy();
  EstimatorParams params;
  params.z_min = 1e-12;
  const IndexSet set = IndexSet::explicit_set({MultiIndex{0}});
  std::map<MultiIndex, long, LexLess> n;
  n[MultiIndex{0}] = 128;
  const EstimateResult a = mismc_estimate(toy, set, n, params, RngStream(7));
  const EstimateResult b =
      single_level_estimate(toy, toy.start_index(), 128, params, RngStream(7));
  CHECK(std::memcmp(&a.value, &b.value, sizeof(double)) == 0);
  CHECK(std::memcmp(&a.numerator, &b.numerator, sizeof(double)) == 0);
  CHECK(a.total_cost == b.total_cost);
}

TEST_CASE("point-mass randomized estimator coincides with single level") {
  const Toy1dModel toy = test::make_toy();
  EstimatorParams params;
  params.z_min = 1e-12;
  // beta huge: every draw lands on the offset and p(offset) rounds to 1.
  const AllocationDistribution point({{500.0, 1.0}}, toy.start_index());
  const EstimateResult a = rmismc_estimate(toy, point, 256, 64, params, RngStream(9));
  const EstimateResult b =
      single_level_estimate(toy, toy.start_index(), 256, params, RngStream(9));
  CHECK(std::memcmp(&a.value, &b.value, sizeof(double)) == 0);
  CHECK(a.populated.size() == 1);
  CHECK(a.populated.begin()->second == 256);
}

TEST_CASE("denominator clamp engages and keeps the value finite") {
  // Likelihood ~ exp(-1e4): Z is astronomically small, so the clamp binds.
  const test::ConstantLikelihoodModel tiny(-1e4);
  EstimatorParams params;
  params.z_min = 1e-6;
  const EstimateResult est =
      single_level_estimate(tiny, MultiIndex{0}, 32, params, RngStream(3));
  CHECK(est.clamped);
  CHECK(std::isfinite(est.value));
  CHECK(est.denominator_raw < params.z_min);
  CHECK(est.value == est.numerator / params.z_min);

  // Healthy run: clamp stays inactive.
  const Toy1dModel toy = test::make_toy();
  params.z_min = 1e-12;
  const EstimateResult ok =
      single_level_estimate(toy, MultiIndex{3}, 64, params, RngStream(4));
  CHECK_FALSE(ok.clamped);
  CHECK(ok.value == ok.numerator / ok.denominator_raw);
}

TEST_CASE("ratio estimate is invariant to likelihood scaling (seed-matched)") {
  const Toy1dModel toy = test::make_toy();
  const double log_c = std::log(37.5);
  const test::ScaledLikelihoodModel scaled(toy, log_c);
  EstimatorParams params;
  params.z_min = 1e-12;
  EstimatorParams scaled_params;
  scaled_params.z_min = params.z_min * 37.5;

  const IndexSet set = IndexSet::tensor_product({3});
  std::map<MultiIndex, long, LexLess> n;
  for (const auto& a : set.members()) n[a] = 64;
  const EstimateResult base = mismc_estimate(toy, set, n, params, RngStream(21));
  const EstimateResult scl = mismc_estimate(scaled, set, n, scaled_params, RngStream(21));
  CHECK(scl.value == doctest::Approx(base.value).epsilon(1e-10));
  CHECK(scl.numerator == doctest::Approx(base.numerator * 37.5).epsilon(1e-10));
  CHECK(scl.denominator_raw ==
        doctest::Approx(base.denominator_raw * 37.5).epsilon(1e-10));
}

TEST_CASE("deterministic allocation follows the sqrt(V/C) profile") {
  const Toy1dModel toy = test::make_toy();
  const auto cpp = [&](const MultiIndex& rel) {
    double c = 0.0;
    for (const auto& t : increment_terms(toy, rel)) c += toy.cost(t.index);
    return c;
  };

  // Single-index set: all budget goes to the one index.
  const IndexSet single = IndexSet::explicit_set({MultiIndex{0}});
  const auto n1 = allocate_samples_deterministic(single, {4.0}, {1.0}, 1000.0, 2, cpp);
  CHECK(n1.at(MultiIndex{0}) == static_cast<long>(std::ceil(1000.0 / cpp(MultiIndex{0}))));

  // Ratio N_{l+1} / N_l approaches 2^(-2.5) once floors are inactive.
  const IndexSet levels = IndexSet::tensor_product({5});
  const auto n2 =
      allocate_samples_deterministic(levels, {4.0}, {1.0}, 5e7, 2, cpp);
  for (int l = 0; l + 1 <= 3; ++l) {
    const double ratio = static_cast<double>(n2.at(MultiIndex{l + 1})) /
                         static_cast<double>(n2.at(MultiIndex{l}));
    CHECK(ratio == doctest::Approx(std::exp2(-2.5)).epsilon(0.01));
  }

  // Floors hold everywhere.
  const auto n3 = allocate_samples_deterministic(levels, {4.0}, {1.0}, 20000.0, 50, cpp);
  for (const auto& [a, cnt] : n3) {
    (void)a;
    CHECK(cnt >= 50);
  }

  // Infeasible budgets are rejected with the minimum attached.
  try {
    allocate_samples_deterministic(levels, {4.0}, {1.0}, 10.0, 50, cpp);
    FAIL("expected InfeasibleBudgetError");
  } catch (const InfeasibleBudgetError& e) {
    CHECK(e.min_feasible_budget > 10.0);
  }
}

TEST_CASE("argument validation") {
  const Toy1dModel toy = test::make_toy();
  EstimatorParams params;

  const IndexSet holey = IndexSet::explicit_set({MultiIndex{0}, MultiIndex{2}});
  std::map<MultiIndex, long, LexLess> n;
  n[MultiIndex{0}] = 8;
  n[MultiIndex{2}] = 8;
  CHECK_THROWS_AS(mismc_estimate(toy, holey, n, params, RngStream(1)), DomainError);

  const IndexSet ok = IndexSet::tensor_product({1});
  std::map<MultiIndex, long, LexLess> too_small;
  too_small[MultiIndex{0}] = 8;
  too_small[MultiIndex{1}] = 1;
  CHECK_THROWS_AS(mismc_estimate(toy, ok, too_small, params, RngStream(1)), DomainError);

  const AllocationDistribution dist({{4.0, 1.0}}, toy.start_index());
  CHECK_THROWS_AS(rmismc_estimate(toy, dist, 999, 50, params, RngStream(1)), DomainError);

  const AllocationDistribution wrong_offset({{4.0, 1.0}}, MultiIndex{0});
  CHECK_THROWS_AS(rmismc_estimate(toy, wrong_offset, 100, 50, params, RngStream(1)),
                  ConfigError);

  params.z_min = 0.0;
  CHECK_THROWS_AS(single_level_estimate(toy, MultiIndex{2}, 16, params, RngStream(1)),
                  ConfigError);
}

TEST_CASE("populated indices and the total cost line up with the runs") {
  const Toy1dModel toy = test::make_toy();
  EstimatorParams params;
  params.z_min = 1e-12;
  const AllocationDistribution dist({{4.0, 1.0}}, toy.start_index());
  const EstimateResult est = rmismc_estimate(toy, dist, 512, 32, params, RngStream(5));
  long total = 0;
  for (const auto& [a, n] : est.populated) {
    (void)a;
    total += n;
  }
  CHECK(total == 512);
  CHECK(est.total_cost > 0.0);
}

TEST_SUITE_END();
