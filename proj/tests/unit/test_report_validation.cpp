#include "doctest.h"
#include "helpers.hpp"
#include "mallows/constants.hpp"
#include "mallows/errors.hpp"
#include "mallows/regenerative.hpp"
#include "mallows/report.hpp"
#include "mallows/validation.hpp"

using namespace mallows;

TEST_CASE("decomposition JSON") {
  const auto d = decompose_antiadditive(testing::perm({4, 3, 2, 1}));
  const Json j = to_json(d, true);
  CHECK(j["kind"] == "antiadditive");
  CHECK(j["cut_points"] == Json::array({1, 2}));
  REQUIRE(j["blocks"].size() == 3);
  CHECK(j["blocks"][0]["kind"] == "pair");
  CHECK(j["blocks"][0]["length"] == 2);
  CHECK(j["blocks"][2]["kind"] == "central");
  CHECK(j["blocks"][2]["length"] == 0);
  CHECK(j["blocks"][0]["block"] == Json::array({2, 1}));
  CHECK_FALSE(to_json(d, false)["blocks"][0].contains("block"));
}

TEST_CASE("constants report JSON carries the documented fields") {
  const auto r = estimate_renewal_constants(0.5, 2000, 2, MonteCarloPlan{1, 10, 3});
  const Json with = to_json(r, true);
  for (const char* key : {"q", "mu", "alpha", "beta", "beta_total", "standard_errors", "sample_count", "seed",
                          "worker_count"}) {
    CAPTURE(key);
    CHECK(with.contains(key));
  }
  CHECK(with["worker_count"] == 3);
  CHECK_FALSE(to_json(r, false).contains("worker_count"));
  CHECK(with["beta"].size() == 2);
  CHECK(to_json(alpha1(0.5)).contains("truncation_bound"));
}

TEST_CASE("validation plumbing") {
  CHECK(parse_profile("desk") == Profile::desk);
  CHECK(parse_profile("deep") == Profile::deep);
  CHECK_THROWS_AS(parse_profile("quick"), BadParameter);
  CHECK(criterion_name(1) == "sampler exactness");
  CHECK_THROWS_AS(criterion_name(12), BadParameter);
  ValidationOptions bad;
  bad.only = {0};
  CHECK_THROWS_AS(run_validation(bad), BadParameter);
}

TEST_CASE("fast criteria pass and their reports do not depend on workers") {
  ValidationOptions a;
  a.only = {2, 8};
  ValidationOptions b = a;
  b.workers = 3;
  const auto ra = run_validation(a);
  const auto rb = run_validation(b);
  REQUIRE(ra.criteria.size() == 2);
  CHECK(ra.passed());
  CHECK_FALSE(ra.cap_hit());
  CHECK(to_json(ra).dump() == to_json(rb).dump());
  const auto single = run_criterion(2, a);
  CHECK(single.passed);
  CHECK(single.id == 2);
}
