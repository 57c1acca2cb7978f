#include "mallows/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "mallows/errors.hpp"
#include "mallows/regenerative.hpp"
#include "mallows/sampler.hpp"

namespace mallows {

// CycleStatistic --------------------------------------------------------------------

CycleStatistic CycleStatistic::cycles_of_length(std::size_t len) {
  if (len == 0) throw BadStatistic("cycle length must be at least 1");
  return CycleStatistic(len);
}

CycleStatistic CycleStatistic::parse(std::string_view text) {
  if (text.empty() || (text.front() != 'C' && text.front() != 'c')) {
    throw BadStatistic("unknown statistic '" + std::string(text) + "' (expected C or C<i>)");
  }
  text.remove_prefix(1);
  if (!text.empty() && text.front() == '_') text.remove_prefix(1);
  if (text.empty()) return total();
  std::size_t len = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), len);
  if (ec != std::errc{} || ptr != text.data() + text.size() || len == 0) {
    throw BadStatistic("unknown statistic 'C" + std::string(text) + "'");
  }
  return cycles_of_length(len);
}

std::string CycleStatistic::name() const {
  return is_total() ? "C" : "C" + std::to_string(length_);
}

void check_statistic_admissible(double q, const CycleStatistic& stat) {
  if (q > 1.0 && !stat.is_total() && stat.is_odd_cycle_count()) {
    throw BadStatistic(stat.name() + " has no Gaussian limit for q > 1; use even lengths or C");
  }
  if (q == 1.0) throw BadParameter("q = 1 has no regenerative structure");
}

// Normality ---------------------------------------------------------------------------

NormalityReport normality_report(std::string statistic, std::size_t n,
                                 std::span<const double> values, bool lattice,
                                 const NormalityThresholds& thresholds) {
  NormalityReport r;
  r.statistic = std::move(statistic);
  r.n = n;
  r.reps = values.size();
  r.lattice = lattice;
  r.thresholds = thresholds;
  RunningMoments m;
  for (double v : values) m.add(v);
  r.mean = m.mean();
  r.variance = m.variance();
  r.skewness = m.skewness();
  r.excess_kurtosis = m.excess_kurtosis();
  r.ks_distance = ks_distance_to_fitted_normal(values, lattice);
  r.skewness_ok = std::abs(r.skewness) < thresholds.max_abs_skewness;
  r.kurtosis_ok = std::abs(r.excess_kurtosis) < thresholds.max_abs_excess_kurtosis;
  r.ks_ok = r.ks_distance < thresholds.max_ks_distance;
  return r;
}

bool CltReport::passed() const noexcept {
  return std::all_of(marginals.begin(), marginals.end(),
                     [](const NormalityReport& m) { return m.passed(); });
}

namespace {

// values[s][rep] for each statistic, in chunk order.
std::vector<std::vector<double>> sample_statistics(double q, std::size_t n, std::size_t reps,
                                                   std::span<const CycleStatistic> stats,
                                                   const MonteCarloPlan& plan) {
  auto per_chunk = run_partitioned(plan, reps, [&](std::size_t, std::size_t share, RngStream& rng) {
    std::vector<std::vector<double>> v(stats.size());
    for (auto& col : v) col.reserve(share);
    for (std::size_t r = 0; r < share; ++r) {
      const CycleCounts cc = cycle_counts(sample_finite(n, q, rng));
      for (std::size_t s = 0; s < stats.size(); ++s) v[s].push_back(stats[s](cc));
    }
    return v;
  });
  std::vector<std::vector<double>> values(stats.size());
  for (auto& chunk : per_chunk) {
    for (std::size_t s = 0; s < stats.size(); ++s) {
      values[s].insert(values[s].end(), chunk[s].begin(), chunk[s].end());
    }
  }
  return values;
}

}  // namespace

CltReport clt_check(double q, std::size_t n, std::size_t reps,
                    std::span<const CycleStatistic> statistics, const MonteCarloPlan& plan,
                    const NormalityThresholds& thresholds) {
  for (const auto& s : statistics) check_statistic_admissible(q, s);
  const auto values = sample_statistics(q, n, reps, statistics, plan);
  CltReport r;
  r.q = q;
  r.n = n;
  r.reps = reps;
  r.seed = plan.seed;
  r.chunks = plan.chunks;
  const std::size_t k = statistics.size();
  for (std::size_t s = 0; s < k; ++s) {
    r.marginals.push_back(normality_report(statistics[s].name(), n, values[s], true, thresholds));
  }
  r.covariance_over_n.assign(k, std::vector<double>(k, 0.0));
  r.covariance_over_n_se.assign(k, std::vector<double>(k, 0.0));
  const double nn = static_cast<double>(n);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      const auto c = sample_covariance(values[a], values[b]);
      r.covariance_over_n[a][b] = r.covariance_over_n[b][a] = c.value / nn;
      r.covariance_over_n_se[a][b] = r.covariance_over_n_se[b][a] = c.standard_error / nn;
    }
  }
  return r;
}

// Scaling --------------------------------------------------------------------------------

ScalingReport mean_variance_scaling(double q, std::span<const std::size_t> sizes,
                                    std::size_t reps, const CycleStatistic& statistic,
                                    const MonteCarloPlan& plan, bool per_size) {
  if (q == 1.0) throw BadParameter("mean_variance_scaling: q must differ from 1");
  ScalingReport r;
  r.q = q;
  r.statistic = statistic.name();
  r.per_size = per_size;
  r.seed = plan.seed;
  r.chunks = plan.chunks;
  const CycleStatistic one[] = {statistic};
  for (std::size_t idx = 0; idx < sizes.size(); ++idx) {
    const std::size_t n = sizes[idx];
    const MonteCarloPlan sub = plan.with_seed(derive_seed(plan.seed, "scaling/" + std::to_string(n)));
    const auto values = sample_statistics(q, n, reps, one, sub);
    RunningMoments m;
    for (double v : values[0]) m.add(v);
    r.rows.push_back({n, reps, m.mean(), m.standard_error(), m.variance(), m.variance_standard_error()});
  }
  if (r.rows.size() >= 2) {
    const auto& a = r.rows[r.rows.size() - 2];
    const auto& b = r.rows.back();
    const double dm = std::abs(r.scaled_mean(a) - r.scaled_mean(b));
    const double sm = std::hypot(r.scaled_mean_se(a), r.scaled_mean_se(b));
    const double dv = std::abs(r.scaled_variance(a) - r.scaled_variance(b));
    const double sv = std::hypot(r.scaled_variance_se(a), r.scaled_variance_se(b));
    r.mean_stable = dm <= 3.0 * sm;
    r.variance_stable = dv <= 3.0 * sv;
  }
  return r;
}

// Parity ---------------------------------------------------------------------------------

std::vector<std::vector<std::uint64_t>> odd_cycle_samples(double q, std::size_t n,
                                                          std::size_t reps, std::size_t i_max,
                                                          const MonteCarloPlan& plan) {
  auto per_chunk = run_partitioned(plan, reps, [&](std::size_t, std::size_t share, RngStream& rng) {
    std::vector<std::vector<std::uint64_t>> rows;
    rows.reserve(share);
    for (std::size_t r = 0; r < share; ++r) {
      const CycleCounts cc = cycle_counts(sample_finite(n, q, rng));
      std::vector<std::uint64_t> row(i_max + 1);
      for (std::size_t i = 0; i <= i_max; ++i) row[i] = cc.of(2 * i + 1);
      rows.push_back(std::move(row));
    }
    return rows;
  });
  std::vector<std::vector<std::uint64_t>> rows;
  rows.reserve(reps);
  for (auto& chunk : per_chunk) {
    for (auto& row : chunk) rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

ParityReport compare_odd_cycles(double q, std::size_t n, std::size_t n_other, std::size_t reps,
                                std::size_t i_max,
                                const std::vector<std::vector<std::uint64_t>>& a,
                                const std::vector<std::vector<std::uint64_t>>& b,
                                double threshold) {
  ParityReport r;
  r.q = q;
  r.n = n;
  r.n_other = n_other;
  r.reps = reps;
  r.i_max = i_max;
  r.pool_at = kDefaultPoolAt;
  r.threshold = threshold;
  r.same_parity = (n % 2) == (n_other % 2);
  std::vector<std::uint64_t> col_a(a.size()), col_b(b.size());
  for (std::size_t i = 0; i <= i_max; ++i) {
    for (std::size_t k = 0; k < a.size(); ++k) col_a[k] = a[k][i];
    for (std::size_t k = 0; k < b.size(); ++k) col_b[k] = b[k][i];
    r.pmf.push_back(pooled_pmf(col_a, r.pool_at));
    r.pmf_other.push_back(pooled_pmf(col_b, r.pool_at));
    r.total_variation.push_back(total_variation(r.pmf.back(), r.pmf_other.back()));
  }
  std::map<std::vector<std::uint64_t>, std::pair<double, double>> joint;
  auto pooled = [&](std::vector<std::uint64_t> row) {
    for (auto& v : row) v = std::min(v, r.pool_at);
    return row;
  };
  for (const auto& row : a) joint[pooled(row)].first += 1.0 / static_cast<double>(a.size());
  for (const auto& row : b) joint[pooled(row)].second += 1.0 / static_cast<double>(b.size());
  double s = 0;
  for (const auto& [key, pq] : joint) s += std::abs(pq.first - pq.second);
  r.joint_total_variation = 0.5 * s;
  if (r.same_parity) {
    const double worst = *std::max_element(r.total_variation.begin(), r.total_variation.end());
    r.passed = worst < threshold;
  }
  return r;
}

}  // namespace

std::pair<ParityReport, ParityReport> parity_limit_check(double q, std::size_t n,
                                                         std::size_t reps, std::size_t i_max,
                                                         const MonteCarloPlan& plan,
                                                         double threshold) {
  if (!(q > 1.0)) throw BadParameter("parity_limit_check: q must exceed 1");
  auto run = [&](std::size_t size) {
    return odd_cycle_samples(q, size, reps, i_max,
                             plan.with_seed(derive_seed(plan.seed, "parity/" + std::to_string(size))));
  };
  const auto base = run(n);
  const auto plus_two = run(n + 2);
  const auto plus_one = run(n + 1);
  return {compare_odd_cycles(q, n, n + 2, reps, i_max, base, plus_two, threshold),
          compare_odd_cycles(q, n, n + 1, reps, i_max, base, plus_one, threshold)};
}

// Size bias ---------------------------------------------------------------------------------

EstimateReport covering_block_length(double q, std::uint64_t n, std::size_t reps,
                                     const MonteCarloPlan& plan) {
  auto per_chunk = run_partitioned(plan, reps, [&](std::size_t, std::size_t share, RngStream& rng) {
    RunningMoments m;
    for (auto len : covering_block_lengths(q, n, share, rng)) m.add(static_cast<double>(len));
    return m;
  });
  RunningMoments all;
  for (const auto& m : per_chunk) all.merge(m);
  return make_estimate("covering_block_length(n=" + std::to_string(n) + ")", all, plan.seed,
                       plan.chunks);
}

RatioEstimate size_bias_target(double q, std::size_t samples, const MonteCarloPlan& plan) {
  if (!(q > 0) || q == 1.0) throw BadParameter("size_bias_target: q must be positive and != 1");
  const bool symmetric = q > 1.0;
  const double chain_q = symmetric ? 1.0 / q : q;
  auto per_chunk = run_partitioned(plan, samples, [&](std::size_t, std::size_t share, RngStream& rng) {
    std::vector<double> lengths;
    lengths.reserve(share);
    for (std::size_t k = 0; k < share; ++k) {
      const auto t = symmetric ? 2 * pair_return_time(chain_q, rng) : single_return_time(chain_q, rng);
      lengths.push_back(static_cast<double>(t));
    }
    return lengths;
  });
  std::vector<double> t, tt;
  t.reserve(samples);
  tt.reserve(samples);
  for (const auto& chunk : per_chunk) {
    for (double x : chunk) {
      t.push_back(x);
      tt.push_back(x * x);
    }
  }
  return ratio_estimate(tt, t);
}

SizeBiasReport size_bias_convergence(double q, std::span<const std::uint64_t> sizes,
                                     std::size_t reps, std::size_t target_samples,
                                     const MonteCarloPlan& plan) {
  SizeBiasReport r;
  r.q = q;
  r.target = size_bias_target(q, target_samples, plan.with_seed(derive_seed(plan.seed, "size-bias/target")));
  for (auto n : sizes) {
    SizeBiasRow row;
    row.n = n;
    row.covering = covering_block_length(
        q, n, reps, plan.with_seed(derive_seed(plan.seed, "size-bias/" + std::to_string(n))));
    row.gap = std::abs(row.covering.mean - r.target.value);
    row.gap_se = std::hypot(row.covering.standard_error, r.target.standard_error);
    r.rows.push_back(row);
  }
  if (!r.rows.empty()) r.final_gap_ok = r.rows.back().gap < 3.0 * r.rows.back().gap_se;
  return r;
}

}  // namespace mallows
