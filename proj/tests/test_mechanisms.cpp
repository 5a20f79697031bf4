#include <cmath>
#include <random>

#include <doctest.h>

#include "pml/experiments.hpp"
#include "pml/leakage.hpp"
#include "pml/mechanisms.hpp"
#include "test_util.hpp"

using namespace pml;

TEST_CASE("utility_safe") {
  const UtilityOrder eq6(IntTable{{3, 2, 1}, {1, 3, 2}, {2, 1, 3}});

  SUBCASE("threshold 1 is the uniform mechanism") {
    const auto mech = utility_safe(eq6, 1);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(mech(i, j) == doctest::Approx(1.0 / 3));
  }

  SUBCASE("threshold 2 zeroes each row's worst output") {
    const auto mech = utility_safe(eq6, 2);
    const RealTable expected{{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(mech(i, j) == doctest::Approx(expected(i, j)));
  }

  SUBCASE("threshold M is deterministic on each row's best output") {
    const auto mech = utility_safe(eq6, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        CHECK(mech(i, j) == (eq6(i, j) == 3 ? 1.0 : 0.0));
  }

  CHECK_THROWS_AS(utility_safe(eq6, 0), std::invalid_argument);
  CHECK_THROWS_AS(utility_safe(eq6, 4), std::invalid_argument);
}

TEST_CASE("utility_safe structure: h-1 zeros per row, worst-case order h") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 5, m = 2 + rng() % 5;
    const auto order = testing::random_order(rng, n, m);
    const int h = 1 + static_cast<int>(rng() % m);
    const auto mech = utility_safe(order, h);
    for (int z : row_zero_counts(mech)) CHECK(z == h - 1);
    CHECK(worst_case_order(mech, order) == h);
  }
}

TEST_CASE("independent mechanism") {
  const Prior prior({0.5, 0.3, 0.2});
  const auto mech = independent(3, {0.1, 0.6, 0.3});
  CHECK(worst_case_pml(prior, mech) == doctest::Approx(0.0).epsilon(1e-12));

  const UtilityOrder order(IntTable{{1, 2, 3}, {3, 2, 1}, {2, 3, 1}});
  const auto point_mass = independent(3, {0.0, 1.0, 0.0});
  CHECK(worst_case_order(point_mass, order) == 2);  // min rank in column 2

  CHECK_THROWS_AS(independent(3, {0.5, 0.4}), std::invalid_argument);
}

TEST_CASE("example1_mechanism") {
  SUBCASE("prior (0.6, 0.25, 0.15)") {
    const auto mech = example1_mechanism(Prior({0.6, 0.25, 0.15}));
    CHECK(mech(0, 0) == doctest::Approx(7.0 / 12));
    CHECK(mech(0, 1) == doctest::Approx(5.0 / 12));
    CHECK(mech(0, 2) == 0.0);
    CHECK(mech(1, 1) == 1.0);
    CHECK(mech(2, 0) == 1.0);
    CHECK(worst_case_pml(Prior({0.6, 0.25, 0.15}), mech) == doctest::Approx(std::log(2.0)));
  }

  SUBCASE("prior (0.5, 0.25, 0.25)") {
    const auto mech = example1_mechanism(Prior({0.5, 0.25, 0.25}));
    CHECK(mech(0, 0) == doctest::Approx(0.5));
    CHECK(mech(0, 1) == doctest::Approx(0.5));
  }

  SUBCASE("preconditions") {
    CHECK_THROWS_AS(example1_mechanism(Prior({0.4, 0.3, 0.3})), std::invalid_argument);
    CHECK_THROWS_AS(example1_mechanism(Prior({0.25, 0.25, 0.25, 0.25})), std::invalid_argument);
  }
}

TEST_CASE("ldp_budget") {
  CHECK(ldp_budget(0.0, 1.0 / 7).value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ldp_budget(1.0, 1.0 / 7).value == doctest::Approx(1.337405098).epsilon(1e-6));
  CHECK_THROWS_AS(ldp_budget(std::log(7.0), 1.0 / 7), std::invalid_argument);
  CHECK_THROWS_AS(ldp_budget(2.5, 1.0 / 7), std::invalid_argument);
  CHECK_THROWS_AS(ldp_budget(-0.1, 1.0 / 7), std::invalid_argument);

  // strictly increasing, blowing up toward the boundary
  double prev = -1.0;
  for (double eps : {0.0, 0.5, 1.0, 1.5, 1.9, 1.94}) {
    const double v = ldp_budget(eps, 1.0 / 7).value;
    CHECK(v > prev);
    prev = v;
  }
  CHECK(ldp_budget(1.9459, 1.0 / 7).value > 9.0);
}

TEST_CASE("exponential_mechanism") {
  const auto scenario = counting_query_scenario();
  const auto& values = *scenario.values;

  SUBCASE("zero budget gives the uniform mechanism") {
    const auto mech = exponential_mechanism(values, {0.0});
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = 0; j < 7; ++j) CHECK(mech(i, j) == doctest::Approx(1.0 / 7));
  }

  SUBCASE("normalizer is twice the largest magnitude (74 here)") {
    const double budget = 2.0;
    const auto mech = exponential_mechanism(values, {budget});
    for (std::size_t i = 0; i < 7; ++i) {
      double norm = 0.0;
      for (std::size_t j = 0; j < 7; ++j) norm += std::exp(values(i, j) * budget / 74.0);
      for (std::size_t j = 0; j < 7; ++j)
        CHECK(mech(i, j) == doctest::Approx(std::exp(values(i, j) * budget / 74.0) / norm));
    }
  }

  SUBCASE("all entries positive, so the worst-case order stays at 1") {
    const auto mech = exponential_mechanism(values, {3.0});
    for (double p : mech.table().data()) CHECK(p > 0.0);
    CHECK(worst_case_order(mech, scenario.order) == 1);
  }
}

TEST_CASE("randomized_response") {
  const auto scenario = counting_query_scenario();
  const auto& values = *scenario.values;

  SUBCASE("remap is the identity for the counting-query values") {
    const auto remap = argmax_remap(values);
    for (std::size_t i = 0; i < 7; ++i) CHECK(remap[i] == i);
  }

  SUBCASE("budget log 6 puts mass 1/2 on the diagonal") {
    const auto mech = randomized_response(values, {std::log(6.0)});
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = 0; j < 7; ++j)
        CHECK(mech(i, j) == doctest::Approx(i == j ? 0.5 : 1.0 / 12));
  }

  SUBCASE("zero budget spreads uniformly over the argmax columns") {
    const auto mech = randomized_response(values, {0.0});
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = 0; j < 7; ++j) CHECK(mech(i, j) == doctest::Approx(1.0 / 7));
  }

  SUBCASE("non-injective remap merges columns") {
    UtilityValues tied(RealTable{{5, 1}, {5, 1}});
    const auto mech = randomized_response(tied, {1.0});
    CHECK(mech(0, 0) == doctest::Approx(1.0));
    CHECK(mech(0, 1) == 0.0);
  }
}

TEST_CASE("piecewise_safe_for_budget") {
  const auto scenario = counting_query_scenario();
  CHECK(piecewise_safe_for_budget(scenario.prior, scenario.order, 1.0).first == 3);
  CHECK(piecewise_safe_for_budget(scenario.prior, scenario.order, 1.95).first == 7);
  CHECK(piecewise_safe_for_budget(scenario.prior, scenario.order, 0.0).first == 1);

  SUBCASE("selected threshold is non-decreasing in the budget") {
    int prev = 0;
    for (double eps = 0.0; eps <= 2.5; eps += 0.01) {
      const int h = piecewise_safe_for_budget(scenario.prior, scenario.order, eps).first;
      CHECK(h >= prev);
      prev = h;
    }
  }
}
