#include <cmath>
#include <set>

#include <doctest.h>

#include "pml/experiments.hpp"
#include "pml/io.hpp"
#include "pml/leakage.hpp"
#include "pml/mechanisms.hpp"

using namespace pml;

TEST_CASE("counting_query_scenario") {
  const auto scenario = counting_query_scenario();
  CHECK(scenario.prior.size() == 7);
  CHECK(scenario.prior[0] == doctest::Approx(1.0 / 7));
  REQUIRE(scenario.values.has_value());
  CHECK((*scenario.values)(0, 6) == -36);
  CHECK(scenario.order(3, 0) == 1);
  CHECK(scenario.order(3, 2) == 5);
  // stored order is consistent with the raw values (validated on build too)
  CHECK(order_from_values(*scenario.values).table() == scenario.order.table());
}

TEST_CASE("cyclic_scenario") {
  const auto scenario = cyclic_scenario({PriorKind::kOneLowThreeHigh, 0.06, 4});
  CHECK(scenario.order(2, 0) == 2);
  CHECK(scenario.order(2, 1) == 1);
  CHECK(scenario.order(2, 2) == 4);
  CHECK(scenario.order(2, 3) == 3);
  CHECK(corollary_epsilon(scenario.prior, scenario.order, 3) ==
        doctest::Approx(0.9852836).epsilon(1e-4));

  SUBCASE("letters are interchangeable") {
    for (int h : {2, 3}) {
      const double ref = corollary_epsilon(scenario.prior, scenario.order, h);
      for (std::size_t idx = 1; idx < 4; ++idx) {
        const auto moved = cyclic_scenario({PriorKind::kOneLowThreeHigh, 0.06, 4}, idx);
        CHECK(corollary_epsilon(moved.prior, moved.order, h) == doctest::Approx(ref));
      }
    }
  }

  CHECK_THROWS_AS(cyclic_scenario({PriorKind::kOneLowThreeHigh, 0.3, 4}),
                  std::invalid_argument);
}

TEST_CASE("prior patterns") {
  const auto one_low = make_prior({PriorKind::kOneLowThreeHigh, 0.02, 4}, 1);
  CHECK(one_low[1] == doctest::Approx(0.02));
  CHECK(one_low[0] == doctest::Approx(0.98 / 3));

  const auto three_low = make_prior({PriorKind::kThreeLowOneHigh, 0.02, 4});
  CHECK(three_low[0] == doctest::Approx(0.94));
  CHECK(three_low[1] == doctest::Approx(0.02));
}

TEST_CASE("sample_min_utility") {
  const auto scenario = counting_query_scenario();

  SUBCASE("deterministic mechanism always reports the diagonal value") {
    const auto best = utility_safe(scenario.order, 7);
    for (std::uint64_t seed : {0ULL, 7ULL, 123ULL}) {
      const auto rec = sample_min_utility(scenario, best, 500, seed);
      CHECK(rec.sample_min_utility == 0);
      CHECK(rec.deterministic_min_utility == 0);
    }
  }

  SUBCASE("samples never undershoot the support minimum") {
    const auto m3 = utility_safe(scenario.order, 3);
    const auto rec = sample_min_utility(scenario, m3, 1000, 0);
    CHECK(rec.deterministic_min_utility == -17);
    CHECK(rec.sample_min_utility >= -17);
  }

  SUBCASE("enough trials hit the support minimum") {
    const auto m3 = utility_safe(scenario.order, 3);
    const auto rec = sample_min_utility(scenario, m3, 100000, 1);
    CHECK(rec.sample_min_utility == -17);
  }

  SUBCASE("single trial draws one supported value") {
    const auto m3 = utility_safe(scenario.order, 3);
    const auto rec = sample_min_utility(scenario, m3, 1, 2);
    CHECK(rec.sample_min_utility >= -17);
    CHECK(rec.sample_min_utility <= 0);
  }

  const auto no_values = cyclic_scenario({PriorKind::kUniform, 0.0, 4});
  CHECK_THROWS_AS(sample_min_utility(no_values, utility_safe(no_values.order, 1), 10, 0),
                  std::invalid_argument);
}

TEST_CASE("fig1_run") {
  const auto records = fig1_run(1000, 0);
  REQUIRE(records.size() == 31 * 3);

  for (const auto& rec : records) {
    CHECK(rec.sample_min_utility >= rec.deterministic_min_utility);
    CHECK(rec.sample_min_utility >= -37);
    if (rec.mechanism_name == "safe") {
      double expected;
      if (rec.eps < std::log(7.0 / 3.0))
        expected = -37;
      else if (rec.eps < std::log(7.0 / 2.0))
        expected = -17;
      else if (rec.eps < std::log(7.0))
        expected = -5;
      else
        expected = 0;
      CHECK(rec.deterministic_min_utility == expected);
      CHECK_FALSE(rec.clamped);
    } else {
      CHECK(rec.deterministic_min_utility == -37);
      CHECK(rec.clamped == (rec.eps >= std::log(7.0)));
    }
  }

  SUBCASE("identical seeds reproduce byte-identical tables") {
    const auto again = fig1_run(1000, 0);
    CHECK(fig1_csv(records) == fig1_csv(again));
    const auto other_seed = fig1_run(1000, 1);
    CHECK(fig1_csv(records) != fig1_csv(other_seed));
  }
}

TEST_CASE("pattern sweeps match their closed forms") {
  const auto fig2 = fig2_run(1e-6);
  const auto fig3 = fig3_run(1e-6);
  REQUIRE(fig2.size() == 10 * 4 * 2);

  for (const auto& rec : fig2) {
    REQUIRE_FALSE(rec.failed);
    CHECK(rec.naive == (rec.h == 1 || rec.h == 4));
    if (rec.mode != Mode::kSafe) continue;
    if (rec.h == 3)
      CHECK(rec.min_eps ==
            doctest::Approx(-std::log(rec.p_min + (1 - rec.p_min) / 3)).epsilon(1e-12));
    if (rec.h == 2)
      CHECK(rec.min_eps == doctest::Approx(-std::log(1 - (1 - rec.p_min) / 3)).epsilon(1e-12));
  }
  for (const auto& rec : fig3) {
    REQUIRE_FALSE(rec.failed);
    if (rec.mode != Mode::kSafe) continue;
    if (rec.h == 3) CHECK(rec.min_eps == doctest::Approx(-std::log(2 * rec.p_min)).epsilon(1e-12));
    if (rec.h == 2) CHECK(rec.min_eps == doctest::Approx(-std::log(3 * rec.p_min)).epsilon(1e-12));
  }
}
