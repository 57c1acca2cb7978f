#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "mallows/errors.hpp"
#include "mallows/parallel.hpp"
#include "mallows/rng.hpp"
#include "mallows/statistics.hpp"

using namespace mallows;

TEST_CASE("running moments") {
  RunningMoments m;
  for (double x : {1.0, 2.0, 3.0, 4.0}) m.add(x);
  CHECK(m.count() == 4);
  CHECK(m.mean() == doctest::Approx(2.5));
  CHECK(m.variance() == doctest::Approx(5.0 / 3.0));
  CHECK(m.standard_error() == doctest::Approx(std::sqrt(5.0 / 12.0)));
  CHECK(m.skewness() == doctest::Approx(0.0));
  CHECK(m.excess_kurtosis() == doctest::Approx(1.64 - 3.0));

  RngStream rng(1, 0);
  RunningMoments all, a, b;
  for (int k = 0; k < 10000; ++k) {
    const double x = std::pow(rng.uniform(), 3.0);
    all.add(x);
    (k % 3 == 0 ? a : b).add(x);
  }
  a.merge(b);
  CHECK(a.count() == all.count());
  CHECK(a.mean() == doctest::Approx(all.mean()).epsilon(1e-12));
  CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-10));
  CHECK(a.skewness() == doctest::Approx(all.skewness()).epsilon(1e-9));
  CHECK(a.excess_kurtosis() == doctest::Approx(all.excess_kurtosis()).epsilon(1e-9));

  RunningMoments empty;
  empty.merge(all);
  CHECK(empty.mean() == all.mean());
}

TEST_CASE("ratio and batch estimates") {
  const double num[] = {2, 4, 6, 8};
  const double den[] = {1, 2, 3, 4};
  const auto r = ratio_estimate(num, den);
  CHECK(r.value == doctest::Approx(2.0));
  CHECK(r.standard_error == doctest::Approx(0.0).epsilon(1e-12));
  const double batches[] = {1.0, 2.0, 3.0};
  const auto b = batch_mean(batches);
  CHECK(b.value == doctest::Approx(2.0));
  CHECK(b.standard_error == doctest::Approx(1.0 / std::sqrt(3.0)));
}

TEST_CASE("normal cdf and KS distance") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  RngStream rng(2, 0);
  std::vector<double> normal, exponential;
  for (int k = 0; k < 20000; ++k) {
    const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
    normal.push_back(std::sqrt(-2 * std::log(u1)) * std::cos(6.283185307179586 * u2));
    exponential.push_back(-std::log1p(-rng.uniform()));
  }
  CHECK(ks_distance_to_fitted_normal(normal, false) < 0.02);
  CHECK(ks_distance_to_fitted_normal(exponential, false) > 0.05);
  // Integer data: the continuity correction removes the lattice artefact.
  std::vector<double> binomial;
  for (int k = 0; k < 20000; ++k) {
    int s = 0;
    for (int j = 0; j < 400; ++j) s += rng.uniform() < 0.5 ? 1 : 0;
    binomial.push_back(s);
  }
  CHECK(ks_distance_to_fitted_normal(binomial, true) < 0.02);
  CHECK(ks_distance_to_fitted_normal(binomial, false) > ks_distance_to_fitted_normal(binomial, true));
}

TEST_CASE("total variation and pooled pmfs") {
  const double p[] = {0.5, 0.5};
  const double q[] = {0.25, 0.25, 0.5};
  CHECK(total_variation(p, q) == doctest::Approx(0.5));
  CHECK(total_variation(p, p) == 0.0);
  const std::uint64_t obs[] = {0, 1, 1, 5, 40, 3};
  const auto pmf = pooled_pmf(obs, 4);
  REQUIRE(pmf.size() == 5);
  CHECK(pmf[1] == doctest::Approx(2.0 / 6.0));
  CHECK(pmf[4] == doctest::Approx(2.0 / 6.0));
  CHECK(std::accumulate(pmf.begin(), pmf.end(), 0.0) == doctest::Approx(1.0));
  CHECK(pooled_pmf(std::span<const std::uint64_t>{}, 4).empty());
}

TEST_CASE("chi-square tests") {
  const std::uint64_t fair[] = {2500, 2500, 2500, 2500};
  const double uniform[] = {0.25, 0.25, 0.25, 0.25};
  const auto g = chi_square_gof(fair, uniform);
  CHECK(g.statistic == doctest::Approx(0.0));
  CHECK(g.degrees_of_freedom == 3);
  CHECK(g.p_value == doctest::Approx(1.0));
  const std::uint64_t skewed[] = {2700, 2500, 2500, 2300};
  const auto s = chi_square_gof(skewed, uniform);
  CHECK(s.statistic == doctest::Approx(32.0));
  CHECK(s.p_value < 1e-5);
  const std::uint64_t a[] = {100, 200, 0, 300};
  const std::uint64_t b[] = {110, 190, 0, 300};
  const auto t = chi_square_two_sample(a, b);
  CHECK(t.degrees_of_freedom == 2);
  CHECK(t.p_value > 0.5);
  const double bad[] = {0.5, 0.5};
  CHECK_THROWS_AS(chi_square_gof(fair, bad), BadParameter);
}

TEST_CASE("sample covariance") {
  const double x[] = {1, 2, 3, 4, 5};
  const double y[] = {2, 4, 6, 8, 10};
  const auto c = sample_covariance(x, y);
  CHECK(c.value == doctest::Approx(5.0));
}

TEST_CASE("partitioned runs do not depend on the worker count") {
  for (unsigned workers : {1u, 2u, 7u}) {
    const MonteCarloPlan plan{5, 13, workers};
    const auto sums = run_partitioned(plan, 1000, [](std::size_t c, std::size_t share, RngStream& rng) {
      double s = static_cast<double>(c);
      for (std::size_t k = 0; k < share; ++k) s += rng.uniform();
      return s;
    });
    const MonteCarloPlan serial{5, 13, 1};
    const auto ref = run_partitioned(serial, 1000, [](std::size_t c, std::size_t share, RngStream& rng) {
      double s = static_cast<double>(c);
      for (std::size_t k = 0; k < share; ++k) s += rng.uniform();
      return s;
    });
    CHECK(sums == ref);
  }
  std::size_t total = 0;
  for (std::size_t c = 0; c < 7; ++c) total += chunk_share(100, 7, c);
  CHECK(total == 100);
  const MonteCarloPlan plan{5, 4, 3};
  CHECK_THROWS_AS(run_partitioned(plan, 10,
                                  [](std::size_t c, std::size_t, RngStream&) -> int {
                                    if (c == 2) throw BadParameter("chunk 2");
                                    return 0;
                                  }),
                  BadParameter);
}
