#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "helpers.hpp"
#include "mallows/constants.hpp"
#include "mallows/errors.hpp"
#include "mallows/parallel.hpp"

using namespace mallows;

TEST_CASE("q_pochhammer") {
  CHECK(q_pochhammer(0.7, 0.3, 0).value == 1.0);
  CHECK(q_pochhammer(0.5, 0.5, 2).value == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(q_pochhammer(0.5, 0.5, 2).terms_used == 2);
  CHECK(q_pochhammer(2.0, 1.5, 3).value == doctest::Approx((1 - 2.0) * (1 - 3.0) * (1 - 4.5)));

  const auto inf = q_pochhammer(0.5, 0.5, std::nullopt, 1e-16);
  CHECK(inf.value == doctest::Approx(0.28878809508660242).epsilon(1e-15));
  CHECK(inf.truncation_bound <= 1e-16);
  for (std::size_t r = 51; r <= 80; ++r) {
    CHECK(std::abs(q_pochhammer(0.5, 0.5, r).value - inf.value) <= 1e-14);
  }
  CHECK_THROWS_AS(q_pochhammer(0.5, 1.0, std::nullopt), Diverges);
  CHECK_THROWS_AS(q_pochhammer(0.5, -1.2, std::nullopt), Diverges);
  CHECK(q_pochhammer(0.0, 0.9, std::nullopt).value == 1.0);
}

TEST_CASE("stationary_mu") {
  for (double q : {0.05, 0.3, 0.5, 0.7, 0.9, 0.97}) {
    const auto law = stationary_mu(q);
    double s = 0;
    for (double p : law.pmf) s += p;
    CAPTURE(q);
    CHECK(std::abs(s - 1.0) <= 1e-12 + law.tail_bound);
    CHECK(law.tail_bound < 1e-12);
    CHECK(law.normalizer == doctest::Approx(q_pochhammer(q, q, std::nullopt).value).epsilon(1e-13));
    for (std::size_t j = 0; j + 1 < law.pmf.size(); ++j) {
      const double ratio = q / (1.0 - std::pow(q, static_cast<double>(j + 1)));
      REQUIRE(law.pmf[j + 1] == doctest::Approx(law.pmf[j] * ratio).epsilon(1e-12));
      if (ratio < 1.0) REQUIRE(law.pmf[j + 1] < law.pmf[j]);
    }
  }
  CHECK(stationary_mu(1e-9).pmf[0] == doctest::Approx(1.0));
  CHECK(stationary_mu(0.5).pmf[0] == doctest::Approx(0.28878809508660242).epsilon(1e-14));
  const auto fixed = stationary_mu(0.5, 60);
  CHECK(fixed.pmf.size() == 61);
  CHECK_THROWS_AS(stationary_mu(0.9, 3), BadParameter);  // tail above tolerance
  CHECK_THROWS_AS(stationary_mu(1.0), BadParameter);
}

TEST_CASE("alpha1 series") {
  // Independent 50-digit evaluations.
  CHECK(alpha1(0.5).value == doctest::Approx(0.22064303609653285).epsilon(1e-14));
  CHECK(alpha1(0.3).value == doctest::Approx(0.45255378112310213).epsilon(1e-14));
  CHECK(alpha1(0.7).value == doctest::Approx(0.098732116576316976).epsilon(1e-14));
  CHECK(alpha1(0.9).value == doctest::Approx(0.027066692675387216).epsilon(1e-13));
  CHECK(alpha1(0.97).value == doctest::Approx(0.0076735379591922500).epsilon(1e-12));
  CHECK(alpha1(0.5).truncation_bound < 1e-14);
  CHECK(alpha1(1e-8).value == doctest::Approx(1.0).epsilon(1e-6));
  for (int k = 1; k < 99; ++k) {
    const double q = k / 100.0;
    const double a = alpha1(q).value;
    CAPTURE(q);
    REQUIRE(a > 0.0);
    REQUIRE(a < 1.0);
  }
  CHECK_THROWS_AS(alpha1(1.0), BadParameter);
  CHECK_THROWS_AS(alpha1(0.0), BadParameter);
}

TEST_CASE("renewal constants") {
  const MonteCarloPlan plan{1234, 50, 1};
  SUBCASE("degenerate limit") {
    const auto r = estimate_renewal_constants(1e-12, 5000, 3, plan);
    CHECK(r.mu.value == 1.0);
    CHECK(r.alpha[0].value == 1.0);
    CHECK(r.alpha[1].value == 0.0);
    CHECK(r.beta_total.value == doctest::Approx(0.0));
    for (const auto& row : r.beta) {
      for (double b : row) CHECK(b == doctest::Approx(0.0));
    }
  }
  SUBCASE("q = 0.5") {
    const auto r = estimate_renewal_constants(0.5, 200000, 4, plan);
    CHECK(r.sample_count == 200000);
    CHECK(testing::within_se(r.alpha[0].value, alpha1(0.5).value, r.alpha[0].standard_error));
    CHECK(testing::within_se(r.mu.value, 1.0 / stationary_mu(0.5).pmf[0], r.mu.standard_error));
    double points = r.alpha_tail_points.value;
    for (std::size_t i = 0; i < r.alpha.size(); ++i) points += static_cast<double>(i + 1) * r.alpha[i].value;
    CHECK(points == doctest::Approx(1.0).epsilon(1e-12));

    Eigen::MatrixXd beta(4, 4);
    double max_se = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(r.beta[i][i] > 0);
      for (std::size_t j = 0; j < 4; ++j) {
        CHECK(r.beta[i][j] == r.beta[j][i]);
        beta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r.beta[i][j];
        max_se = std::max(max_se, r.beta_se[i][j]);
      }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(beta);
    CHECK(eig.eigenvalues().minCoeff() >= -3.0 * max_se);
    CHECK(r.beta_total.value > 0);
  }
  SUBCASE("standard errors shrink like one over root n") {
    const MonteCarloPlan fine{99, 200, 1};
    const auto small = estimate_renewal_constants(0.5, 100000, 2, fine);
    const auto large = estimate_renewal_constants(0.5, 200000, 2, fine.with_seed(100));
    const double ratio = large.alpha[0].standard_error / small.alpha[0].standard_error;
    CHECK(ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.2));
    const double mu_ratio = large.mu.standard_error / small.mu.standard_error;
    CHECK(mu_ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.2));
  }
  CHECK_THROWS_AS(estimate_renewal_constants(1.5, 10, 1, plan), BadParameter);
  CHECK_THROWS_AS(estimate_renewal_constants(0.5, 10, 0, plan), BadParameter);
}

TEST_CASE("symmetric constants") {
  const MonteCarloPlan plan{4321, 20, 1};
  SUBCASE("large q: pair blocks are almost all swaps") {
    const auto r = estimate_symmetric_constants(50.0, 20000, 2, plan);
    CHECK(r.route == ConstantsRoute::symmetric);
    CHECK(r.cycle_length(1) == 2);
    const double mu0 = stationary_mu(1.0 / 50.0).pmf[0];
    CHECK(testing::within_se(r.mu.value, 2.0 / (mu0 * mu0), r.mu.standard_error));
    const auto huge = estimate_symmetric_constants(500.0, 20000, 1, plan);
    CHECK(std::abs(huge.alpha[0].value - 0.5) < 0.01);
    CHECK(std::abs(huge.alpha[0].value - 0.5) < std::abs(r.alpha[0].value - 0.5));
  }
  SUBCASE("q = 2") {
    const auto r = estimate_symmetric_constants(2.0, 30000, 3, plan);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) CHECK(r.beta[i][j] == r.beta[j][i]);
    }
    const double mu0 = stationary_mu(0.5).pmf[0];
    CHECK(testing::within_se(r.mu.value, 2.0 / (mu0 * mu0), r.mu.standard_error));
    CHECK(r.alpha[0].value > 0.06);
    CHECK(r.alpha[0].value < 0.075);
  }
  CHECK_THROWS_AS(estimate_symmetric_constants(0.5, 10, 1, plan), BadParameter);
}

TEST_CASE("block feature sums merge associatively") {
  BlockFeatureSums a(2), b(2), all(2);
  const double xs[][2] = {{1, 0}, {0, 1}, {2, 1}, {1, 3}};
  const double lens[] = {1, 2, 4, 7};
  for (int k = 0; k < 4; ++k) {
    (k < 2 ? a : b).add(lens[k], xs[k]);
    all.add(lens[k], xs[k]);
  }
  a.merge(b);
  CHECK(a.count() == all.count());
  CHECK(a.mean_length() == doctest::Approx(all.mean_length()));
  CHECK(a.alpha(0) == doctest::Approx(all.alpha(0)));
  CHECK(a.beta(0, 1) == doctest::Approx(all.beta(0, 1)));
  CHECK(a.beta(0, 1) == doctest::Approx(a.beta(1, 0)));
  CHECK(all.alpha(0) == doctest::Approx(4.0 / 14.0));
}
