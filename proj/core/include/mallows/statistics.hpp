#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mallows {

/// Streaming count, mean and central moments up to order four. Merging is
/// exact (pairwise update formulas), so per-chunk accumulators combine in a
/// fixed order to a result independent of the worker count.
class RunningMoments {
 public:
  void add(double x) noexcept;
  void merge(const RunningMoments& other) noexcept;

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance.
  double variance() const noexcept;
  double standard_error() const noexcept;
  double skewness() const noexcept;
  double excess_kurtosis() const noexcept;
  /// Standard error of the sample variance, from the fourth central moment.
  double variance_standard_error() const noexcept;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0, m2_ = 0, m3_ = 0, m4_ = 0;
};

/// Monte Carlo estimate with provenance.
struct EstimateReport {
  std::string name;
  double mean = 0;
  double variance = 0;
  double standard_error = 0;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  std::size_t chunks = 0;
};

EstimateReport make_estimate(std::string name, const RunningMoments& m, std::uint64_t seed,
                             std::size_t chunks);

struct RatioEstimate {
  double value = 0;
  double standard_error = 0;
};

/// mean(num) / mean(den) with a delta-method standard error.
RatioEstimate ratio_estimate(std::span<const double> num, std::span<const double> den);

/// Mean of the batch estimates and the standard error sd / sqrt(batches).
RatioEstimate batch_mean(std::span<const double> batch_estimates);

double normal_cdf(double z) noexcept;

/// Kolmogorov–Smirnov distance between the sample and a normal law with the
/// sample's own mean and standard deviation. With `lattice` set the data are
/// integer valued and the normal CDF is evaluated with a half-unit continuity
/// correction at each integer.
double ks_distance_to_fitted_normal(std::span<const double> values, bool lattice);

/// Total-variation distance between two pmfs on {0, 1, ...}; missing cells are 0.
double total_variation(std::span<const double> p, std::span<const double> q);

/// Empirical pmf of nonnegative integer observations; values >= pool_at are
/// pooled into the last cell, which then has index pool_at.
std::vector<double> pooled_pmf(std::span<const std::uint64_t> observations, std::uint64_t pool_at);

struct ChiSquareResult {
  double statistic = 0;
  std::size_t degrees_of_freedom = 0;
  double p_value = 1;
};

/// Goodness of fit of observed counts against cell probabilities.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> probabilities);

/// Homogeneity of two count vectors over the same cells.
ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                      std::span<const std::uint64_t> b);

/// Sample covariance and its standard error (from the fourth cross moment).
struct CovarianceEstimate {
  double value = 0;
  double standard_error = 0;
};
CovarianceEstimate sample_covariance(std::span<const double> x, std::span<const double> y);

}  // namespace mallows
