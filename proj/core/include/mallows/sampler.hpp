#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mallows/permutation.hpp"
#include "mallows/rng.hpp"

namespace mallows {

/// P(k) = q^{k-1}(1-q), k >= 1, by inversion of the closed-form CDF.
/// Throws BadParameter unless 0 < q < 1.
std::uint64_t geometric(double q, RngStream& rng);

/// P(k) ∝ q^{k-1} on {1..m}, any q > 0 (q = 1 is uniform).
std::size_t truncated_geometric(double q, std::size_t m, RngStream& rng);

/// w ~ Mallows(n, q) for any q > 0: position i takes the k-th smallest unused
/// value with probability ∝ q^{k-1}.
Permutation sample_finite(std::size_t n, double q, RngStream& rng);

/// The one-sided Mallows process on N, driven one geometric rank at a time.
/// pending() is the number of unused values below the running maximum, which
/// is exactly the chain state max_{i<=t} w(i) - t.
class ProcessGenerator {
 public:
  /// Appends the value whose rank among unused positive integers is `rank`.
  std::uint32_t step(std::uint64_t rank);

  std::size_t pending() const noexcept { return gaps_.size(); }
  std::uint64_t time() const noexcept { return time_; }
  std::uint32_t running_max() const noexcept { return max_; }
  void reset() noexcept;

 private:
  std::vector<std::uint32_t> gaps_;  // unused values below max_, ascending
  std::uint32_t max_ = 0;
  std::uint64_t time_ = 0;
};

struct ProcessPrefix {
  double q = 0.5;
  std::vector<std::uint32_t> values;  // w(1), ..., w(t)
  std::vector<std::uint64_t> ranks;   // geometric draw used at each step

  std::size_t horizon() const noexcept { return values.size(); }
};

/// First t values of the Mallows process with parameter 0 < q < 1.
ProcessPrefix sample_process_prefix(double q, std::size_t t, RngStream& rng);

}  // namespace mallows
