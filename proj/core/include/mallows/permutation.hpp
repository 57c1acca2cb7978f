#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mallows {

/// A bijection of {1..n} in one-line notation. n = 0 is the empty permutation.
class Permutation {
 public:
  using value_type = std::uint32_t;

  Permutation() = default;

  /// Validates that `values` is a permutation of {1..values.size()}.
  /// Throws NotABijection otherwise.
  explicit Permutation(std::vector<value_type> values);

  static Permutation identity(std::size_t n);

  /// Skips validation. The caller guarantees the bijection invariant.
  static Permutation from_trusted(std::vector<value_type> values) noexcept;

  std::size_t size() const noexcept { return image_.size(); }
  bool empty() const noexcept { return image_.empty(); }

  /// 1-based: w(i) for i in [1, n].
  value_type operator()(std::size_t i) const noexcept { return image_[i - 1]; }

  std::span<const value_type> image() const noexcept { return image_; }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<value_type> image_;
};

Permutation make_permutation(std::span<const std::int64_t> values);

/// Number of cycles of each length plus the total number of cycles.
class CycleCounts {
 public:
  CycleCounts() = default;
  explicit CycleCounts(std::size_t n) : counts_(n + 1, 0) {}

  /// C_len; zero for lengths outside [1, n].
  std::uint64_t of(std::size_t len) const noexcept {
    return len < counts_.size() ? counts_[len] : 0;
  }
  std::uint64_t total() const noexcept { return total_; }

  /// Σ len·C_len, equal to n of the source permutation.
  std::uint64_t points() const noexcept;

  /// Largest length with a nonzero count; 0 if there are no cycles.
  std::size_t max_length() const noexcept;

  void add_cycle(std::size_t len);
  CycleCounts& operator+=(const CycleCounts& other);

  friend bool operator==(const CycleCounts& a, const CycleCounts& b) noexcept;

 private:
  std::vector<std::uint64_t> counts_;  // counts_[len], slot 0 unused
  std::uint64_t total_ = 0;
};

std::uint64_t inversions(const Permutation& w);
CycleCounts cycle_counts(const Permutation& w);
Permutation reverse(const Permutation& w);

/// Rank replacement: position i receives the rank of values[i]. Throws
/// DuplicateValue when two entries coincide.
Permutation relative_order(std::span<const std::int64_t> values);
Permutation relative_order(std::span<const std::uint32_t> values);

std::string to_one_line(const Permutation& w);
std::ostream& operator<<(std::ostream& os, const Permutation& w);

// Mallows weights ------------------------------------------------------------

/// Z_n(q) = Π_{k=1}^{n} (1 + q + ... + q^{k-1}). Switches to the log domain
/// internally when n > 300 or q > 1.
long double mallows_normalizer(std::size_t n, double q);
long double log_mallows_normalizer(std::size_t n, double q);

inline constexpr std::size_t kDefaultOracleCap = 9;

struct ExactEntry {
  Permutation perm;
  std::uint64_t inversions = 0;
  long double probability = 0;
};

struct ExactDistribution {
  std::size_t n = 0;
  double q = 1.0;
  std::vector<ExactEntry> entries;  // lexicographic order of perm

  long double total_probability() const noexcept;
};

/// Enumerates all of S_n with P(w) = q^{l(w)} / Z_n(q). Throws TooLarge when
/// n > cap and BadParameter when q <= 0.
ExactDistribution exact_distribution(std::size_t n, double q,
                                     std::size_t cap = kDefaultOracleCap);

using PermutationStatistic = std::function<std::vector<double>(const Permutation&)>;

std::vector<long double> exact_expectation(const ExactDistribution& dist,
                                           const PermutationStatistic& statistic);
std::vector<long double> exact_expectation(std::size_t n, double q,
                                           const PermutationStatistic& statistic,
                                           std::size_t cap = kDefaultOracleCap);

/// CSV with header `perm,inversions,probability`; perm is quoted one-line
/// notation since it contains commas.
void write_csv(std::ostream& os, const ExactDistribution& dist);

}  // namespace mallows
