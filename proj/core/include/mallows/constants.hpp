#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mallows/parallel.hpp"

namespace mallows {

struct QSeriesValue {
  double value = 0;
  std::size_t terms_used = 0;
  double truncation_bound = 0;  // bound on |exact - value| from discarded terms
};

/// (a; q)_r = Π_{i=0}^{r-1} (1 - a q^i). `terms = std::nullopt` requests the
/// infinite product, which needs |q| < 1 (Diverges otherwise) and stops once
/// the tail bound drops below `tol`.
QSeriesValue q_pochhammer(double a, double q, std::optional<std::size_t> terms,
                          double tol = 1e-15);

/// Stationary law of the chain M_{n+1} = max(M_n, Z) - 1:
/// mu_j = (q;q)_inf q^j / (q;q)_j, a pmf on {0, 1, ...}.
struct StationaryLaw {
  std::vector<double> pmf;  // mu_0 .. mu_{j_max}
  double tail_bound = 0;    // Σ_{j > j_max} mu_j <= tail_bound
  double normalizer = 0;    // (q;q)_inf
};

/// pmf on {0..j_max}. Without j_max, the smallest support whose certified
/// tail is below `tol`. Throws BadParameter if q is outside (0, 1) or if the
/// tail beyond a given j_max cannot be certified below `tol`.
StationaryLaw stationary_mu(double q, std::optional<std::size_t> j_max = std::nullopt,
                            double tol = 1e-12);

/// Fixed-point density of the infinite Mallows process:
/// (1-q)/q (q;q)_inf Σ_{j>=0} q^{(j+1)^2} / (q;q)_j^2.
QSeriesValue alpha1(double q, double tol = 1e-14);

// Renewal-representation constants ---------------------------------------------------

struct Estimate {
  double value = 0;
  double standard_error = 0;
};

enum class ConstantsRoute { renewal, symmetric };

/// Limit constants estimated from i.i.d. regenerative blocks. For the renewal
/// route index i counts i-cycles of excursions; for the symmetric route it
/// counts 2i-cycles of interior pair blocks.
struct ConstantsReport {
  ConstantsRoute route = ConstantsRoute::renewal;
  double q = 0;
  std::size_t i_max = 0;
  Estimate mu;                                // mean block size
  std::vector<Estimate> alpha;                // i = 1..i_max
  Estimate alpha_tail_points;                 // Σ over longer cycles of len·count, per unit length
  std::vector<std::vector<double>> beta;      // i_max x i_max, symmetric
  std::vector<std::vector<double>> beta_se;
  Estimate alpha_total;                       // total cycle count per unit length
  Estimate beta_total;
  std::uint64_t sample_count = 0;
  std::uint64_t seed = 0;
  std::size_t chunks = 0;
  unsigned workers = 1;

  /// Cycle length that index i (1-based) refers to.
  std::size_t cycle_length(std::size_t i) const noexcept {
    return route == ConstantsRoute::renewal ? i : 2 * i;
  }
};

/// Per-block sufficient statistics for the ratio estimators. Features are
/// [count_1, ..., count_{i_max}, total cycles, tail points]. Merging is
/// associative and exact.
class BlockFeatureSums {
 public:
  explicit BlockFeatureSums(std::size_t features = 0);

  void add(double length, std::span<const double> features);
  void merge(const BlockFeatureSums& other);

  std::uint64_t count() const noexcept { return n_; }
  std::size_t features() const noexcept { return sum_x_.size(); }

  double mean_length() const;
  /// E(x_k) / E(T).
  double alpha(std::size_t k) const;
  /// (1/E(T)) Cov(x_k - alpha_k T, x_l - alpha_l T), sample covariance.
  double beta(std::size_t k, std::size_t l) const;

 private:
  std::uint64_t n_ = 0;
  long double sum_t_ = 0, sum_tt_ = 0;
  std::vector<long double> sum_x_, sum_xt_;
  std::vector<long double> sum_xx_;  // row-major features x features
};

ConstantsReport summarize_blocks(ConstantsRoute route, double q, std::size_t i_max,
                                 const std::vector<BlockFeatureSums>& per_chunk,
                                 const MonteCarloPlan& plan);

ConstantsReport estimate_renewal_constants(double q, std::size_t num_excursions,
                                           std::size_t i_max, const MonteCarloPlan& plan);

inline constexpr std::size_t kDefaultAmbientSize = 2001;

ConstantsReport estimate_symmetric_constants(double q, std::size_t num_blocks, std::size_t i_max,
                                             const MonteCarloPlan& plan,
                                             std::size_t ambient_n = kDefaultAmbientSize);

}  // namespace mallows
