#include "mallows/validation.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numeric>

#include "mallows/constants.hpp"
#include "mallows/errors.hpp"
#include "mallows/harness.hpp"
#include "mallows/parallel.hpp"
#include "mallows/regenerative.hpp"
#include "mallows/sampler.hpp"
#include "mallows/statistics.hpp"

namespace mallows {

namespace {

struct Context {
  std::uint64_t seed;
  std::size_t chunks;
  unsigned workers;
  std::size_t scale;  // 1 for desk, 10 for deep

  MonteCarloPlan plan(std::string_view tag) const {
    return MonteCarloPlan{derive_seed(seed, tag), chunks, workers};
  }
  std::size_t reps(std::size_t desk) const { return desk * scale; }
};

bool within(double a, double b, double se, double k = 3.0) { return std::abs(a - b) <= k * se; }

Json agreement(double a, double b, double se) {
  return Json{{"difference", a - b}, {"combined_se", se}, {"within_3_se", within(a, b, se)}};
}

// Rank of w among permutations of its size in lexicographic order.
std::size_t lexicographic_rank(const Permutation& w) {
  const std::size_t n = w.size();
  std::size_t rank = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    std::size_t smaller_later = 0;
    for (std::size_t j = i + 1; j <= n; ++j) smaller_later += w(j) < w(i) ? 1 : 0;
    rank = rank * (n - i + 1) + smaller_later;
  }
  return rank;
}

// Criterion 1 ---------------------------------------------------------------------

CriterionResult sampler_exactness(const Context& ctx) {
  CriterionResult r;
  const std::size_t samples = ctx.reps(1'000'000);
  Json cases = Json::array();
  bool ok = true;
  for (std::size_t n : {3, 4, 5}) {
    for (double q : {0.3, 0.7, 2.0}) {
      const auto dist = exact_distribution(n, q);
      const std::size_t cells = dist.entries.size();
      const auto plan = ctx.plan("sampler/" + std::to_string(n) + "/" + std::to_string(q));
      auto per_chunk = run_partitioned(plan, samples, [&](std::size_t, std::size_t share, RngStream& rng) {
        std::vector<std::uint64_t> counts(cells, 0);
        for (std::size_t k = 0; k < share; ++k) ++counts[lexicographic_rank(sample_finite(n, q, rng))];
        return counts;
      });
      std::vector<std::uint64_t> counts(cells, 0);
      for (const auto& c : per_chunk) {
        for (std::size_t i = 0; i < cells; ++i) counts[i] += c[i];
      }
      std::vector<double> probs;
      for (const auto& e : dist.entries) probs.push_back(static_cast<double>(e.probability));
      const auto chi = chi_square_gof(counts, probs);
      const bool pass = chi.p_value > 1e-3;
      ok = ok && pass;
      cases.push_back(Json{{"n", n},
                           {"q", q},
                           {"samples", samples},
                           {"chi_square", chi.statistic},
                           {"dof", chi.degrees_of_freedom},
                           {"p_value", chi.p_value},
                           {"passed", pass}});
    }
  }
  r.passed = ok;
  r.details = Json{{"p_value_threshold", 1e-3}, {"cases", cases}};
  return r;
}

// Criterion 2 ---------------------------------------------------------------------

CriterionResult oracle_sanity(const Context&) {
  CriterionResult r;
  const PermutationStatistic fixed_points = [](const Permutation& w) {
    return std::vector<double>{static_cast<double>(cycle_counts(w).of(1))};
  };
  Json two = Json::array();
  double worst_two = 0;
  for (int k = 0; k < 20; ++k) {
    const double q = 0.05 * std::pow(400.0, k / 19.0);  // 0.05 .. 20
    const double got = static_cast<double>(exact_expectation(2, q, fixed_points)[0]);
    const double want = 2.0 / (1.0 + q);
    worst_two = std::max(worst_two, std::abs(got - want));
    two.push_back(Json{{"q", q}, {"expectation", got}, {"formula", want}});
  }
  Json sums = Json::array();
  double worst_sum = 0;
  for (std::size_t n = 1; n <= 8; ++n) {
    for (double q : {0.05, 0.3, 0.7, 1.0, 2.0, 20.0}) {
      const double err = std::abs(static_cast<double>(exact_distribution(n, q).total_probability()) - 1.0);
      worst_sum = std::max(worst_sum, err);
      sums.push_back(Json{{"n", n}, {"q", q}, {"abs_error", err}});
    }
  }
  r.passed = worst_two <= 1e-12 && worst_sum <= 1e-12;
  r.details = Json{{"tolerance", 1e-12},
                   {"n2_fixed_points", two},
                   {"n2_max_abs_error", worst_two},
                   {"probability_sums", sums},
                   {"sum_max_abs_error", worst_sum}};
  return r;
}

// Criterion 3 ---------------------------------------------------------------------

CriterionResult chain_renewal_consistency(const Context& ctx) {
  CriterionResult r;
  const double q = 0.5;
  const std::uint64_t steps = ctx.reps(10'000'000);
  const std::uint64_t burn_in = 1000;

  const auto occ_plan = ctx.plan("chain/occupation");
  auto occupations = run_partitioned(occ_plan, steps, [&](std::size_t, std::size_t share, RngStream& rng) {
    return occupation_distribution(q, share, burn_in, rng);
  });
  Occupation occ;
  std::vector<double> zero_batches;
  for (const auto& o : occupations) {
    if (occ.counts.size() < o.counts.size()) occ.counts.resize(o.counts.size(), 0);
    for (std::size_t j = 0; j < o.counts.size(); ++j) occ.counts[j] += o.counts[j];
    occ.steps += o.steps;
    zero_batches.push_back(o.counts.empty() ? 0.0 : static_cast<double>(o.counts[0]) / static_cast<double>(o.steps));
  }
  const auto empirical = occ.pmf();
  const auto law = stationary_mu(q);
  const double tv = total_variation(empirical, law.pmf) + 0.5 * law.tail_bound;
  const auto zero = batch_mean(zero_batches);

  const std::size_t excursions = ctx.reps(100'000);
  const auto exc_plan = ctx.plan("chain/excursions");
  auto lengths = run_partitioned(exc_plan, excursions, [&](std::size_t, std::size_t share, RngStream& rng) {
    RunningMoments m;
    for (auto t : excursion_lengths(q, share, rng)) m.add(static_cast<double>(t));
    return m;
  });
  RunningMoments t_moments;
  for (const auto& m : lengths) t_moments.merge(m);
  const double inverse_mean = 1.0 / t_moments.mean();
  const double inverse_mean_se = t_moments.standard_error() / (t_moments.mean() * t_moments.mean());
  const double kac_se = std::hypot(zero.standard_error, inverse_mean_se);
  const bool kac_ok = within(zero.value, inverse_mean, kac_se);

  const std::size_t first_returns = ctx.reps(1'000'000);
  const auto t1_plan = ctx.plan("chain/t-equals-one");
  auto ones = run_partitioned(t1_plan, first_returns, [&](std::size_t, std::size_t share, RngStream& rng) {
    std::uint64_t hits = 0;
    for (std::size_t k = 0; k < share; ++k) hits += single_return_time(q, rng) == 1 ? 1 : 0;
    return hits;
  });
  const double p1 = static_cast<double>(std::accumulate(ones.begin(), ones.end(), std::uint64_t{0})) /
                    static_cast<double>(first_returns);
  const bool p1_ok = std::abs(p1 - 0.5) <= 0.005;

  r.passed = tv < 0.005 && kac_ok && p1_ok;
  r.details = Json{
      {"q", q},
      {"occupation", Json{{"steps", occ.steps}, {"burn_in_per_chunk", burn_in}, {"total_variation", tv}, {"threshold", 0.005}}},
      {"kac", Json{{"occupation_of_zero", to_json(zero)},
                   {"inverse_mean_excursion", inverse_mean},
                   {"inverse_mean_excursion_se", inverse_mean_se},
                   {"stationary_mu0", law.pmf[0]},
                   {"excursions", excursions},
                   {"agreement", agreement(zero.value, inverse_mean, kac_se)}}},
      {"p_t_equals_one", Json{{"estimate", p1}, {"samples", first_returns}, {"target", 0.5}, {"tolerance", 0.005}, {"passed", p1_ok}}}};
  return r;
}

// Criterion 4 ---------------------------------------------------------------------

CriterionResult alpha_triangulation(const Context& ctx) {
  CriterionResult r;
  const double q = 0.5;
  const auto series = alpha1(q);
  const auto renewal = estimate_renewal_constants(q, ctx.reps(100'000), 1, ctx.plan("alpha/renewal"));
  const std::size_t sizes[] = {10'000};
  const auto slope = mean_variance_scaling(q, sizes, ctx.reps(200), CycleStatistic::cycles_of_length(1),
                                           ctx.plan("alpha/slope"));
  const auto& row = slope.rows.front();
  const double a_series = series.value, se_series = series.truncation_bound;
  const double a_renewal = renewal.alpha[0].value, se_renewal = renewal.alpha[0].standard_error;
  const double a_slope = slope.scaled_mean(row), se_slope = slope.scaled_mean_se(row);
  const double s_sr = std::hypot(se_series, se_renewal);
  const double s_ss = std::hypot(se_series, se_slope);
  const double s_rs = std::hypot(se_renewal, se_slope);
  r.passed = within(a_series, a_renewal, s_sr) && within(a_series, a_slope, s_ss) &&
             within(a_renewal, a_slope, s_rs);
  r.details = Json{{"q", q},
                   {"series", to_json(series)},
                   {"renewal", Json{{"value", a_renewal}, {"standard_error", se_renewal}, {"excursions", renewal.sample_count}}},
                   {"slope", Json{{"n", row.n}, {"reps", row.reps}, {"value", a_slope}, {"standard_error", se_slope}}},
                   {"series_vs_renewal", agreement(a_series, a_renewal, s_sr)},
                   {"series_vs_slope", agreement(a_series, a_slope, s_ss)},
                   {"renewal_vs_slope", agreement(a_renewal, a_slope, s_rs)}};
  return r;
}

// Criterion 5 ---------------------------------------------------------------------

CriterionResult gaussian_shape_below_one(const Context& ctx) {
  CriterionResult r;
  const double q = 0.5;
  const std::vector<CycleStatistic> stats{CycleStatistic::total(), CycleStatistic::cycles_of_length(1),
                                          CycleStatistic::cycles_of_length(2)};
  const auto clt = clt_check(q, 10'000, ctx.reps(10'000), stats, ctx.plan("clt/below-one"));
  const auto constants = estimate_renewal_constants(q, ctx.reps(1'000'000), 2, ctx.plan("clt/below-one/beta"));
  const double cov = clt.covariance_over_n[1][2];
  const double cov_se = clt.covariance_over_n_se[1][2];
  const double beta = constants.beta[0][1];
  const double beta_se = constants.beta_se[0][1];
  const double se = std::hypot(cov_se, beta_se);
  const bool shapes = clt.marginals[0].passed() && clt.marginals[1].passed();
  r.passed = shapes && within(cov, beta, se);
  r.details = Json{{"clt", to_json(clt)},
                   {"shape_checked", Json::array({"C", "C1"})},
                   {"beta12", Json{{"value", beta}, {"standard_error", beta_se}, {"excursions", constants.sample_count}}},
                   {"covariance_c1_c2_over_n", Json{{"value", cov}, {"standard_error", cov_se}}},
                   {"agreement", agreement(cov, beta, se)}};
  return r;
}

// Criterion 6 ---------------------------------------------------------------------

CriterionResult even_cycles_above_one(const Context& ctx) {
  CriterionResult r;
  const double q = 2.0;
  const std::vector<CycleStatistic> stats{CycleStatistic::cycles_of_length(2)};
  const auto clt = clt_check(q, 10'000, ctx.reps(10'000), stats, ctx.plan("clt/above-one"));
  const std::size_t sizes[] = {2500, 5000, 10'000};
  const auto scaling = mean_variance_scaling(q, sizes, ctx.reps(2000), stats[0], ctx.plan("scaling/even"));
  const auto constants = estimate_symmetric_constants(q, ctx.reps(100'000), 1, ctx.plan("constants/symmetric"));
  const auto& last = scaling.rows.back();
  const double slope = scaling.scaled_mean(last), slope_se = scaling.scaled_mean_se(last);
  const double a = constants.alpha[0].value, a_se = constants.alpha[0].standard_error;
  const double se = std::hypot(slope_se, a_se);
  r.passed = clt.marginals[0].passed() && scaling.mean_stable && within(slope, a, se);
  r.details = Json{{"clt", to_json(clt)},
                   {"scaling", to_json(scaling)},
                   {"alpha_prime_1", Json{{"value", a}, {"standard_error", a_se}, {"blocks", constants.sample_count}}},
                   {"slope_vs_blocks", agreement(slope, a, se)}};
  return r;
}

// Criterion 7 ---------------------------------------------------------------------

CriterionResult odd_cycles_above_one(const Context& ctx) {
  CriterionResult r;
  const double q = 2.0;
  const std::size_t sizes[] = {1000, 2000, 4000};
  const auto scaling = mean_variance_scaling(q, sizes, ctx.reps(10'000), CycleStatistic::cycles_of_length(1),
                                             ctx.plan("scaling/odd"), false);
  const std::size_t n = 1000;
  const std::size_t reps = ctx.reps(100'000);
  const auto [same, other] = parity_limit_check(q, n, reps, 2, ctx.plan("parity"));

  // Independent harvest of even central blocks at a larger ambient size.
  const std::size_t ambient = 2 * n;
  const auto harvest_plan = ctx.plan("parity/central");
  auto per_chunk = run_partitioned(harvest_plan, reps, [&](std::size_t, std::size_t share, RngStream& rng) {
    std::vector<std::uint64_t> fixed;
    fixed.reserve(share);
    sample_symmetric_blocks(q, ambient, share, rng, [&](const SymmetricBlock& b, Parity) {
      if (b.kind == SymmetricKind::central) fixed.push_back(cycle_counts(b.block).of(1));
    });
    return fixed;
  });
  std::vector<std::uint64_t> central;
  for (const auto& c : per_chunk) central.insert(central.end(), c.begin(), c.end());
  const auto central_pmf = pooled_pmf(central, kDefaultPoolAt);
  const double tv_central = total_variation(same.pmf[0], central_pmf);

  const bool parity_ok = same.total_variation[0] < 0.02;
  const bool central_ok = tv_central < 0.02;
  r.passed = scaling.mean_stable && scaling.variance_stable && parity_ok && central_ok;
  r.details = Json{{"scaling_raw", to_json(scaling)},
                   {"same_parity", to_json(same)},
                   {"opposite_parity", to_json(other)},
                   {"c1_tv_same_parity", same.total_variation[0]},
                   {"central_block", Json{{"ambient_n", ambient},
                                          {"blocks", central.size()},
                                          {"c1_pmf", central_pmf},
                                          {"tv_vs_n", tv_central}}},
                   {"threshold", 0.02}};
  return r;
}

// Criterion 8 ---------------------------------------------------------------------

struct StructuralTally {
  std::uint64_t cases = 0;
  std::uint64_t reconstruction = 0;
  std::uint64_t additivity = 0;
  std::uint64_t pair_even = 0;
  std::uint64_t reversal = 0;
  std::uint64_t points = 0;
};

CycleCounts block_cycle_sum(const Decomposition& d) {
  CycleCounts sum;
  for (const auto& b : d.blocks) sum += cycle_counts(b.perm);
  return sum;
}

CriterionResult structural_invariants(const Context& ctx) {
  CriterionResult r;
  static constexpr std::array<double, 7> qs{0.1, 0.5, 0.9, 1.0, 1.2, 2.0, 10.0};
  const std::size_t cases = ctx.reps(100'000);
  auto per_chunk = run_partitioned(ctx.plan("structure"), cases, [&](std::size_t, std::size_t share, RngStream& rng) {
    StructuralTally t;
    for (std::size_t k = 0; k < share; ++k) {
      const double q = qs[rng() % qs.size()];
      const std::size_t n = 1 + rng() % 200;
      const Permutation w = sample_finite(n, q, rng);
      const CycleCounts cc = cycle_counts(w);
      const auto add = decompose_additive(w);
      const auto anti = decompose_antiadditive(w);
      ++t.cases;
      if (add.reassemble() != w || anti.reassemble() != w) ++t.reconstruction;
      if (block_cycle_sum(add) != cc || block_cycle_sum(anti) != cc) ++t.additivity;
      for (const auto& b : anti.blocks) {
        if (b.kind != BlockKind::pair) continue;
        const auto bc = cycle_counts(b.perm);
        for (std::size_t len = 1; len <= bc.max_length(); len += 2) {
          if (bc.of(len) != 0) {
            ++t.pair_even;
            break;
          }
        }
      }
      if (inversions(w) + inversions(reverse(w)) != n * (n - 1) / 2) ++t.reversal;
      if (cc.points() != n) ++t.points;
    }
    return t;
  });
  StructuralTally all;
  for (const auto& t : per_chunk) {
    all.cases += t.cases;
    all.reconstruction += t.reconstruction;
    all.additivity += t.additivity;
    all.pair_even += t.pair_even;
    all.reversal += t.reversal;
    all.points += t.points;
  }
  r.passed = all.reconstruction == 0 && all.additivity == 0 && all.pair_even == 0 && all.reversal == 0 &&
             all.points == 0;
  r.details = Json{{"cases", all.cases},
                   {"q_values", qs},
                   {"n_range", Json::array({1, 200})},
                   {"violations", Json{{"reconstruction", all.reconstruction},
                                       {"cycle_additivity", all.additivity},
                                       {"odd_cycle_in_pair_block", all.pair_even},
                                       {"reversal_inversions", all.reversal},
                                       {"cycle_points", all.points}}}};
  return r;
}

// Criterion 9 ---------------------------------------------------------------------

CriterionResult size_bias(const Context& ctx) {
  CriterionResult r;
  const double q = 0.5;
  const std::uint64_t n = 10'000;
  const auto covering = covering_block_length(q, n, ctx.reps(20'000), ctx.plan("size-bias/covering"));
  const auto target = size_bias_target(q, ctx.reps(1'000'000), ctx.plan("size-bias/target"));
  const double gap_se = std::hypot(covering.standard_error, target.standard_error);
  const bool covering_ok = within(covering.mean, target.value, gap_se);

  const std::size_t returns = ctx.reps(1'000'000);
  auto per_chunk = run_partitioned(ctx.plan("size-bias/pair"), returns, [&](std::size_t, std::size_t share, RngStream& rng) {
    RunningMoments m;
    std::uint64_t ones = 0;
    for (auto t : pair_chain_return_times(q, share, rng)) {
      m.add(static_cast<double>(t));
      ones += t == 1 ? 1 : 0;
    }
    return std::pair{m, ones};
  });
  RunningMoments ret;
  std::uint64_t ones = 0;
  for (const auto& [m, k] : per_chunk) {
    ret.merge(m);
    ones += k;
  }
  const double p1 = static_cast<double>(ones) / static_cast<double>(returns);
  const bool p1_ok = std::abs(p1 - 0.25) <= 0.005;
  const double mu0 = stationary_mu(q).pmf[0];
  const double kac = ret.mean() * mu0 * mu0;
  const double kac_se = ret.standard_error() * mu0 * mu0;
  const bool kac_ok = within(kac, 1.0, kac_se);

  r.passed = covering_ok && p1_ok && kac_ok;
  r.details = Json{{"q", q},
                   {"covering", to_json(covering)},
                   {"size_biased_mean", to_json(target)},
                   {"covering_vs_target", agreement(covering.mean, target.value, gap_se)},
                   {"pair_chain", Json{{"returns", returns},
                                       {"p_return_equals_one", p1},
                                       {"p_tolerance", 0.005},
                                       {"mean_return", ret.mean()},
                                       {"mean_return_se", ret.standard_error()},
                                       {"mu0", mu0},
                                       {"kac_product", kac},
                                       {"kac", agreement(kac, 1.0, kac_se)}}}};
  return r;
}

// Criterion 10 --------------------------------------------------------------------

Json half_sample_moments(const std::vector<std::vector<std::uint64_t>>& per_chunk, bool& ok) {
  std::array<long double, 4> first{}, second{};
  std::uint64_t n_first = 0, n_second = 0;
  std::uint64_t total = 0;
  for (const auto& c : per_chunk) total += c.size();
  std::uint64_t seen = 0;
  for (const auto& c : per_chunk) {
    for (auto t : c) {
      auto& acc = seen < total / 2 ? first : second;
      (seen < total / 2 ? n_first : n_second) += 1;
      long double p = 1;
      for (auto& a : acc) {
        p *= static_cast<long double>(t);
        a += p;
      }
      ++seen;
    }
  }
  Json rows = Json::array();
  for (std::size_t k = 0; k < 4; ++k) {
    const double a = static_cast<double>(first[k] / n_first);
    const double b = static_cast<double>(second[k] / n_second);
    const double rel = std::abs(a - b) / (0.5 * (a + b));
    ok = ok && rel < 0.05;
    rows.push_back(Json{{"k", k + 1}, {"first_half", a}, {"second_half", b}, {"relative_difference", rel}});
  }
  return rows;
}

CriterionResult moment_stability(const Context& ctx) {
  CriterionResult r;
  const double q = 0.5;
  const std::size_t samples = ctx.reps(1'000'000);
  auto t = run_partitioned(ctx.plan("moments/excursion"), samples, [&](std::size_t, std::size_t share, RngStream& rng) {
    return excursion_lengths(q, share, rng);
  });
  auto rp = run_partitioned(ctx.plan("moments/pair"), samples, [&](std::size_t, std::size_t share, RngStream& rng) {
    return pair_chain_return_times(q, share, rng);
  });
  bool ok = true;
  Json jt = half_sample_moments(t, ok);
  Json jr = half_sample_moments(rp, ok);
  r.passed = ok;
  r.details = Json{{"q", q}, {"samples", samples}, {"threshold", 0.05}, {"excursion_length", jt}, {"pair_return", jr}};
  return r;
}

// Criterion 11 --------------------------------------------------------------------

Json meta_tests(const Context& ctx) {
  const std::size_t reps = ctx.reps(10'000);
  auto draws = [&](std::string_view tag, auto&& transform) {
    auto per_chunk = run_partitioned(ctx.plan(tag), reps, [&](std::size_t, std::size_t share, RngStream& rng) {
      std::vector<double> v;
      v.reserve(share);
      for (std::size_t k = 0; k < share; ++k) v.push_back(transform(rng));
      return v;
    });
    std::vector<double> all;
    for (const auto& c : per_chunk) all.insert(all.end(), c.begin(), c.end());
    return all;
  };
  const auto normal = draws("meta/normal", [](RngStream& rng) {
    const double u1 = 1.0 - rng.uniform();  // (0, 1]
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  });
  const auto exponential = draws("meta/exponential", [](RngStream& rng) { return -std::log1p(-rng.uniform()); });
  const auto nr = normality_report("normal", 0, normal, false);
  const auto er = normality_report("exponential", 0, exponential, false);
  return Json{{"normal", to_json(nr)}, {"exponential", to_json(er)}, {"normal_passes", nr.passed()}, {"exponential_fails", !er.passed()}};
}

CriterionResult dispatch(int id, const Context& ctx) {
  switch (id) {
    case 1: return sampler_exactness(ctx);
    case 2: return oracle_sanity(ctx);
    case 3: return chain_renewal_consistency(ctx);
    case 4: return alpha_triangulation(ctx);
    case 5: return gaussian_shape_below_one(ctx);
    case 6: return even_cycles_above_one(ctx);
    case 7: return odd_cycles_above_one(ctx);
    case 8: return structural_invariants(ctx);
    case 9: return size_bias(ctx);
    case 10: return moment_stability(ctx);
    default: throw BadParameter("unknown criterion " + std::to_string(id));
  }
}

Context context_of(const ValidationOptions& o) {
  if (o.chunks == 0) throw BadParameter("validation: chunks must be positive");
  return Context{o.seed, o.chunks, std::max(1u, o.workers), o.profile == Profile::deep ? std::size_t{10} : std::size_t{1}};
}

std::vector<int> selected(const ValidationOptions& o) {
  std::vector<int> ids = o.only;
  if (ids.empty()) {
    ids.resize(kCriterionCount);
    std::iota(ids.begin(), ids.end(), 1);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (int id : ids) {
    if (id < 1 || id > kCriterionCount) throw BadParameter("unknown criterion " + std::to_string(id));
  }
  return ids;
}

CriterionResult timed(int id, const std::function<CriterionResult()>& body) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = body();
  } catch (const ResourceCapExceeded& e) {
    r = CriterionResult{};
    r.passed = false;
    r.cap_hit = true;
    r.details = Json{{"error", e.what()}};
  }
  r.id = id;
  r.name = criterion_name(id);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

Profile parse_profile(std::string_view text) {
  if (text == "desk") return Profile::desk;
  if (text == "deep") return Profile::deep;
  throw BadParameter("unknown profile '" + std::string(text) + "' (expected desk or deep)");
}

const char* to_string(Profile profile) noexcept { return profile == Profile::deep ? "deep" : "desk"; }

std::string criterion_name(int id) {
  static const std::array<const char*, kCriterionCount> names{
      "sampler exactness",
      "oracle sanity",
      "chain and renewal consistency",
      "alpha1 triangulation",
      "gaussian shape below one",
      "even cycles above one",
      "odd cycles above one",
      "structural invariants",
      "size bias",
      "moment stability",
      "reproducibility",
  };
  if (id < 1 || id > kCriterionCount) throw BadParameter("unknown criterion " + std::to_string(id));
  return names[static_cast<std::size_t>(id - 1)];
}

CriterionResult run_criterion(int id, const ValidationOptions& options) {
  if (id == kCriterionCount) {
    ValidationOptions o = options;
    o.only = {kCriterionCount};
    return run_validation(o).criteria.back();
  }
  const Context ctx = context_of(options);
  return timed(id, [&] { return dispatch(id, ctx); });
}

ValidationReport run_validation(const ValidationOptions& options) {
  const Context ctx = context_of(options);
  const auto ids = selected(options);
  ValidationReport report{options.seed, options.chunks, options.profile, {}};
  for (int id : ids) {
    if (id == kCriterionCount) continue;
    report.criteria.push_back(timed(id, [&] { return dispatch(id, ctx); }));
    if (options.on_result) options.on_result(report.criteria.back());
  }
  if (std::find(ids.begin(), ids.end(), kCriterionCount) == ids.end()) return report;

  auto result = timed(kCriterionCount, [&] {
    std::vector<CriterionResult> reference = report.criteria;
    if (reference.empty()) {
      for (int id = 1; id < kCriterionCount; ++id) reference.push_back(timed(id, [&] { return dispatch(id, ctx); }));
    }
    Context alt = ctx;
    alt.workers = ctx.workers == 4 ? 1 : 4;
    Json mismatched = Json::array();
    for (const auto& ref : reference) {
      const auto again = timed(ref.id, [&] { return dispatch(ref.id, alt); });
      if (to_json(again).dump() != to_json(ref).dump()) mismatched.push_back(ref.id);
    }
    const Json meta = meta_tests(ctx);
    CriterionResult r;
    r.passed = mismatched.empty() && meta["normal_passes"].get<bool>() && meta["exponential_fails"].get<bool>();
    Json compared = Json::array();
    for (const auto& ref : reference) compared.push_back(ref.id);
    r.details = Json{{"compared_criteria", compared},
                     {"worker_counts", Json::array({std::min(ctx.workers, alt.workers), std::max(ctx.workers, alt.workers)})},
                     {"mismatched_criteria", mismatched},
                     {"byte_identical", mismatched.empty()},
                     {"meta_tests", meta}};
    return r;
  });
  report.criteria.push_back(std::move(result));
  if (options.on_result) options.on_result(report.criteria.back());
  return report;
}

bool ValidationReport::passed() const noexcept {
  return !criteria.empty() &&
         std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.passed; });
}

bool ValidationReport::cap_hit() const noexcept {
  return std::any_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.cap_hit; });
}

Json to_json(const CriterionResult& result) {
  Json j{{"id", result.id}, {"name", result.name}, {"passed", result.passed}};
  if (result.cap_hit) j["resource_cap_hit"] = true;
  j["details"] = result.details;
  return j;
}

Json to_json(const ValidationReport& report) {
  Json criteria = Json::array();
  for (const auto& c : report.criteria) criteria.push_back(to_json(c));
  return Json{{"seed", report.seed},
              {"chunks", report.chunks},
              {"profile", to_string(report.profile)},
              {"criteria", criteria},
              {"passed", report.passed()}};
}

}  // namespace mallows
