#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mallows/parallel.hpp"
#include "mallows/permutation.hpp"
#include "mallows/statistics.hpp"

namespace mallows {

/// A cycle statistic: the total number of cycles `C` or the count `C<i>` of
/// i-cycles. Both are additive over additive blocks; even-length counts and
/// C are additive over anti-additive blocks.
class CycleStatistic {
 public:
  static CycleStatistic total() { return CycleStatistic(0); }
  static CycleStatistic cycles_of_length(std::size_t len);
  /// Parses "C" or "C<i>" (i >= 1). Throws BadStatistic otherwise.
  static CycleStatistic parse(std::string_view text);

  bool is_total() const noexcept { return length_ == 0; }
  std::size_t length() const noexcept { return length_; }
  bool is_odd_cycle_count() const noexcept { return length_ % 2 == 1; }
  std::string name() const;

  double operator()(const CycleCounts& cc) const noexcept {
    return static_cast<double>(is_total() ? cc.total() : cc.of(length_));
  }

  friend bool operator==(const CycleStatistic&, const CycleStatistic&) = default;

 private:
  explicit CycleStatistic(std::size_t len) : length_(len) {}
  std::size_t length_;
};

/// Rejects odd-cycle statistics for q > 1 (BadStatistic): those stay bounded
/// and have no Gaussian limit there.
void check_statistic_admissible(double q, const CycleStatistic& stat);

struct NormalityThresholds {
  double max_abs_skewness = 0.1;
  double max_abs_excess_kurtosis = 0.2;
  double max_ks_distance = 0.02;
  std::size_t min_reps = 1000;
};

struct NormalityReport {
  std::string statistic;
  std::size_t n = 0;
  std::size_t reps = 0;
  double mean = 0;
  double variance = 0;
  double skewness = 0;
  double excess_kurtosis = 0;
  double ks_distance = 0;
  bool lattice = false;
  NormalityThresholds thresholds;
  bool skewness_ok = false;
  bool kurtosis_ok = false;
  bool ks_ok = false;

  bool passed() const noexcept {
    return reps >= thresholds.min_reps && skewness_ok && kurtosis_ok && ks_ok;
  }
};

/// Shape statistics of `values` standardized by their own mean and sd.
NormalityReport normality_report(std::string statistic, std::size_t n,
                                 std::span<const double> values, bool lattice,
                                 const NormalityThresholds& thresholds = {});

struct CltReport {
  double q = 0;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::vector<NormalityReport> marginals;
  std::vector<std::vector<double>> covariance_over_n;
  std::vector<std::vector<double>> covariance_over_n_se;
  std::uint64_t seed = 0;
  std::size_t chunks = 0;

  bool passed() const noexcept;
};

/// Samples `reps` permutations of size n and reports per-statistic shape
/// checks plus the empirical covariance matrix divided by n.
CltReport clt_check(double q, std::size_t n, std::size_t reps,
                    std::span<const CycleStatistic> statistics, const MonteCarloPlan& plan,
                    const NormalityThresholds& thresholds = {});

struct ScalingRow {
  std::size_t n = 0;
  std::size_t reps = 0;
  double mean = 0, mean_se = 0;
  double variance = 0, variance_se = 0;
};

struct ScalingReport {
  double q = 0;
  std::string statistic;
  bool per_size = true;  // compare mean/n and var/n rather than raw values
  std::vector<ScalingRow> rows;
  bool mean_stable = false;
  bool variance_stable = false;
  std::uint64_t seed = 0;
  std::size_t chunks = 0;

  double scaled_mean(const ScalingRow& r) const noexcept {
    return per_size ? r.mean / static_cast<double>(r.n) : r.mean;
  }
  double scaled_mean_se(const ScalingRow& r) const noexcept {
    return per_size ? r.mean_se / static_cast<double>(r.n) : r.mean_se;
  }
  double scaled_variance(const ScalingRow& r) const noexcept {
    return per_size ? r.variance / static_cast<double>(r.n) : r.variance;
  }
  double scaled_variance_se(const ScalingRow& r) const noexcept {
    return per_size ? r.variance_se / static_cast<double>(r.n) : r.variance_se;
  }
};

/// Mean and variance of the statistic at each size. Stability compares the
/// two largest sizes: successive differences within 3 combined SE.
ScalingReport mean_variance_scaling(double q, std::span<const std::size_t> sizes,
                                    std::size_t reps, const CycleStatistic& statistic,
                                    const MonteCarloPlan& plan, bool per_size = true);

struct ParityReport {
  double q = 0;
  std::size_t n = 0;
  std::size_t n_other = 0;
  std::size_t reps = 0;
  std::size_t i_max = 0;
  std::uint64_t pool_at = 0;             // counts >= pool_at share one cell
  std::vector<std::vector<double>> pmf;        // pmf[i] of C_{2i+1} at n
  std::vector<std::vector<double>> pmf_other;  // same at n_other
  std::vector<double> total_variation;   // per odd length
  double joint_total_variation = 0;      // on the vector (C_1, C_3, ...)
  bool same_parity = false;
  double threshold = 0.02;
  /// Set only for same-parity comparisons.
  std::optional<bool> passed;
};

inline constexpr std::uint64_t kDefaultPoolAt = 32;

/// Odd-cycle pmfs at n against n + 2 (same parity, thresholded) and n + 1
/// (opposite parity, descriptive only).
std::pair<ParityReport, ParityReport> parity_limit_check(double q, std::size_t n,
                                                         std::size_t reps, std::size_t i_max,
                                                         const MonteCarloPlan& plan,
                                                         double threshold = 0.02);

/// Odd-cycle counts (C_1, C_3, ..., C_{2 i_max + 1}) of `reps` samples at size n.
std::vector<std::vector<std::uint64_t>> odd_cycle_samples(double q, std::size_t n,
                                                          std::size_t reps, std::size_t i_max,
                                                          const MonteCarloPlan& plan);

/// Length of the regenerative block covering position n, averaged over reps.
EstimateReport covering_block_length(double q, std::uint64_t n, std::size_t reps,
                                     const MonteCarloPlan& plan);

/// E(T^2)/E(T) for the block length law: excursion sizes for q < 1, twice the
/// pair-chain return times at 1/q for q > 1.
RatioEstimate size_bias_target(double q, std::size_t samples, const MonteCarloPlan& plan);

struct SizeBiasRow {
  std::uint64_t n = 0;
  EstimateReport covering;
  double gap = 0;     // |E(T^(n)) - E(T^2)/E(T)|
  double gap_se = 0;  // combined standard error
};

struct SizeBiasReport {
  double q = 0;
  RatioEstimate target;
  std::vector<SizeBiasRow> rows;
  bool final_gap_ok = false;  // largest n: gap < 3 combined SE
};

SizeBiasReport size_bias_convergence(double q, std::span<const std::uint64_t> sizes,
                                     std::size_t reps, std::size_t target_samples,
                                     const MonteCarloPlan& plan);

}  // namespace mallows
