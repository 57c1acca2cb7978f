#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "mallows/constants.hpp"
#include "mallows/errors.hpp"
#include "mallows/harness.hpp"
#include "mallows/rng.hpp"

using namespace mallows;

TEST_CASE("cycle statistic parsing") {
  CHECK(CycleStatistic::parse("C").is_total());
  CHECK(CycleStatistic::parse("C1").length() == 1);
  CHECK(CycleStatistic::parse("C_12").length() == 12);
  CHECK(CycleStatistic::parse("C2").name() == "C2");
  CHECK(CycleStatistic::parse("C").name() == "C");
  CHECK(CycleStatistic::parse("C3").is_odd_cycle_count());
  CHECK_FALSE(CycleStatistic::parse("C4").is_odd_cycle_count());
  for (const char* bad : {"", "C0", "D1", "C-1", "Cx", "C1x", "C 1"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(CycleStatistic::parse(bad), BadStatistic);
  }
  const auto cc = cycle_counts(testing::perm({2, 1, 3, 5, 4}));
  CHECK(CycleStatistic::total()(cc) == 3);
  CHECK(CycleStatistic::cycles_of_length(2)(cc) == 2);
}

TEST_CASE("statistic admissibility") {
  CHECK_THROWS_AS(check_statistic_admissible(2.0, CycleStatistic::cycles_of_length(1)), BadStatistic);
  CHECK_THROWS_AS(check_statistic_admissible(2.0, CycleStatistic::cycles_of_length(3)), BadStatistic);
  CHECK_NOTHROW(check_statistic_admissible(2.0, CycleStatistic::cycles_of_length(2)));
  CHECK_NOTHROW(check_statistic_admissible(2.0, CycleStatistic::total()));
  CHECK_NOTHROW(check_statistic_admissible(0.5, CycleStatistic::cycles_of_length(1)));
  CHECK_THROWS_AS(check_statistic_admissible(1.0, CycleStatistic::total()), BadParameter);
  const std::vector<CycleStatistic> odd{CycleStatistic::cycles_of_length(1)};
  CHECK_THROWS_AS(clt_check(2.0, 100, 1000, odd, MonteCarloPlan{}), BadStatistic);
}

TEST_CASE("normality thresholds have power and are not vacuous") {
  RngStream rng(3, 0);
  std::vector<double> normal, exponential;
  for (int k = 0; k < 10000; ++k) {
    const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
    normal.push_back(std::sqrt(-2 * std::log(u1)) * std::cos(6.283185307179586 * u2));
    exponential.push_back(-std::log1p(-rng.uniform()));
  }
  const auto n = normality_report("normal", 0, normal, false);
  const auto e = normality_report("exponential", 0, exponential, false);
  CHECK(n.passed());
  CHECK_FALSE(e.passed());
  CHECK_FALSE(e.skewness_ok);
  const auto few = normality_report("few", 0, std::span<const double>(normal.data(), 500), false);
  CHECK_FALSE(few.passed());  // below the minimum replicate count
}

TEST_CASE("clt_check produces a symmetric covariance matrix") {
  const std::vector<CycleStatistic> stats{CycleStatistic::total(), CycleStatistic::cycles_of_length(1),
                                          CycleStatistic::cycles_of_length(2)};
  const auto r = clt_check(0.5, 2000, 2000, stats, MonteCarloPlan{7, 10, 1});
  REQUIRE(r.marginals.size() == 3);
  CHECK(r.marginals[1].statistic == "C1");
  CHECK(r.marginals[1].lattice);
  CHECK(r.marginals[1].mean / 2000 == doctest::Approx(alpha1(0.5).value).epsilon(0.02));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(r.covariance_over_n[i][j] == r.covariance_over_n[j][i]);
  }
  CHECK(r.covariance_over_n[1][1] == doctest::Approx(r.marginals[1].variance / 2000).epsilon(1e-9));
}

TEST_CASE("mean and variance scaling") {
  SUBCASE("degenerate limit: every point is fixed") {
    const std::size_t sizes[] = {10, 100};
    const auto r = mean_variance_scaling(1e-12, sizes, 50, CycleStatistic::cycles_of_length(1), MonteCarloPlan{});
    for (const auto& row : r.rows) CHECK(r.scaled_mean(row) == 1.0);
  }
  SUBCASE("slope agrees with the renewal estimate") {
    const std::size_t sizes[] = {2500, 5000};
    const MonteCarloPlan plan{8, 20, 1};
    const auto r = mean_variance_scaling(0.5, sizes, 400, CycleStatistic::cycles_of_length(1), plan);
    CHECK(r.per_size);
    CHECK(r.rows.size() == 2);
    const auto c = estimate_renewal_constants(0.5, 100000, 1, plan.with_seed(9));
    const auto& last = r.rows.back();
    CHECK(testing::within_se(r.scaled_mean(last), c.alpha[0].value,
                             std::hypot(r.scaled_mean_se(last), c.alpha[0].standard_error)));
  }
  const std::size_t sizes[] = {10};
  CHECK_THROWS_AS(mean_variance_scaling(1.0, sizes, 10, CycleStatistic::total(), MonteCarloPlan{}), BadParameter);
}

TEST_CASE("odd cycles above one") {
  const MonteCarloPlan plan{10, 10, 1};
  SUBCASE("huge q at even n: no fixed points") {
    const auto s = odd_cycle_samples(50.0, 100, 2000, 0, plan);
    std::size_t zero = 0;
    for (const auto& v : s) zero += v[0] == 0 ? 1 : 0;
    CHECK(static_cast<double>(zero) / s.size() > 0.9);
  }
  SUBCASE("parity report structure and same-parity means") {
    const auto [same, other] = parity_limit_check(2.0, 200, 20000, 2, plan);
    CHECK(same.same_parity);
    CHECK_FALSE(other.same_parity);
    CHECK(same.n_other == 202);
    CHECK(other.n_other == 201);
    CHECK(same.passed.has_value());
    CHECK_FALSE(other.passed.has_value());
    for (const auto* r : {&same, &other}) {
      for (const auto& pmf : r->pmf) CHECK(std::accumulate(pmf.begin(), pmf.end(), 0.0) == doctest::Approx(1.0));
      for (double tv : r->total_variation) {
        CHECK(tv >= 0.0);
        CHECK(tv <= 1.0);
      }
    }
    CHECK(*same.passed);

    // Total odd-cycle count at n and n + 2.
    const auto a = odd_cycle_samples(2.0, 200, 20000, 3, plan.with_seed(11));
    const auto b = odd_cycle_samples(2.0, 202, 20000, 3, plan.with_seed(12));
    RunningMoments ma, mb;
    for (const auto& v : a) ma.add(static_cast<double>(std::accumulate(v.begin(), v.end(), std::uint64_t{0})));
    for (const auto& v : b) mb.add(static_cast<double>(std::accumulate(v.begin(), v.end(), std::uint64_t{0})));
    CHECK(testing::within_se(ma.mean(), mb.mean(), std::hypot(ma.standard_error(), mb.standard_error())));
  }
  CHECK_THROWS_AS(parity_limit_check(0.5, 100, 10, 1, plan), BadParameter);
}

TEST_CASE("size bias") {
  const MonteCarloPlan plan{13, 10, 1};
  SUBCASE("degenerate limit") {
    const auto c = covering_block_length(1e-12, 50, 100, plan);
    CHECK(c.mean == 1.0);
    CHECK(size_bias_target(1e-12, 1000, plan).value == 1.0);
  }
  SUBCASE("q = 0.5 converges to the size-biased mean") {
    const std::uint64_t sizes[] = {1000, 10000};
    const auto r = size_bias_convergence(0.5, sizes, 20000, 400000, plan);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.final_gap_ok);
    CHECK(r.target.value > 1.0 / stationary_mu(0.5).pmf[0]);
  }
  SUBCASE("q = 2 uses doubled pair returns") {
    const std::uint64_t sizes[] = {2000};
    const auto r = size_bias_convergence(2.0, sizes, 10000, 200000, plan);
    CHECK(r.final_gap_ok);
  }
}
