#include "mallows/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "mallows/errors.hpp"

namespace mallows {

namespace {

bool is_bijection(std::span<const Permutation::value_type> values) {
  const std::size_t n = values.size();
  std::vector<bool> seen(n + 1, false);
  for (auto v : values) {
    if (v < 1 || v > n || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

// Counts inversions of buf[lo, hi) while merge-sorting it, using tmp as scratch.
std::uint64_t merge_count(std::vector<std::uint32_t>& buf,
                          std::vector<std::uint32_t>& tmp, std::size_t lo,
                          std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t count = merge_count(buf, tmp, lo, mid) + merge_count(buf, tmp, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (buf[j] < buf[i]) {
      count += mid - i;
      tmp[k++] = buf[j++];
    } else {
      tmp[k++] = buf[i++];
    }
  }
  while (i < mid) tmp[k++] = buf[i++];
  while (j < hi) tmp[k++] = buf[j++];
  std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo),
            tmp.begin() + static_cast<std::ptrdiff_t>(hi),
            buf.begin() + static_cast<std::ptrdiff_t>(lo));
  return count;
}

template <typename T>
Permutation rank_replace(std::span<const T> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<Permutation::value_type> ranks(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (r > 0 && values[order[r]] == values[order[r - 1]]) {
      throw DuplicateValue("relative_order: repeated value " +
                           std::to_string(values[order[r]]));
    }
    ranks[order[r]] = static_cast<Permutation::value_type>(r + 1);
  }
  return Permutation::from_trusted(std::move(ranks));
}

}  // namespace

Permutation::Permutation(std::vector<value_type> values) : image_(std::move(values)) {
  if (!is_bijection(image_)) {
    throw NotABijection("values do not form a permutation of {1.." +
                        std::to_string(image_.size()) + "}");
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<value_type> v(n);
  std::iota(v.begin(), v.end(), value_type{1});
  return from_trusted(std::move(v));
}

Permutation Permutation::from_trusted(std::vector<value_type> values) noexcept {
  Permutation p;
  p.image_ = std::move(values);
  return p;
}

Permutation make_permutation(std::span<const std::int64_t> values) {
  const auto n = static_cast<std::int64_t>(values.size());
  std::vector<Permutation::value_type> image;
  image.reserve(values.size());
  for (auto v : values) {
    if (v < 1 || v > n) {
      throw NotABijection("value " + std::to_string(v) + " outside {1.." +
                          std::to_string(n) + "}");
    }
    image.push_back(static_cast<Permutation::value_type>(v));
  }
  return Permutation(std::move(image));
}

// CycleCounts ---------------------------------------------------------------

std::uint64_t CycleCounts::points() const noexcept {
  std::uint64_t s = 0;
  for (std::size_t len = 1; len < counts_.size(); ++len) s += len * counts_[len];
  return s;
}

std::size_t CycleCounts::max_length() const noexcept {
  for (std::size_t len = counts_.size(); len-- > 1;) {
    if (counts_[len] != 0) return len;
  }
  return 0;
}

void CycleCounts::add_cycle(std::size_t len) {
  if (len >= counts_.size()) counts_.resize(len + 1, 0);
  ++counts_[len];
  ++total_;
}

CycleCounts& CycleCounts::operator+=(const CycleCounts& other) {
  if (other.counts_.size() > counts_.size()) counts_.resize(other.counts_.size(), 0);
  for (std::size_t len = 1; len < other.counts_.size(); ++len) counts_[len] += other.counts_[len];
  total_ += other.total_;
  return *this;
}

bool operator==(const CycleCounts& a, const CycleCounts& b) noexcept {
  if (a.total_ != b.total_) return false;
  const std::size_t m = std::max(a.counts_.size(), b.counts_.size());
  for (std::size_t len = 1; len < m; ++len) {
    if (a.of(len) != b.of(len)) return false;
  }
  return true;
}

// Core operations ------------------------------------------------------------

std::uint64_t inversions(const Permutation& w) {
  std::vector<std::uint32_t> buf(w.image().begin(), w.image().end());
  std::vector<std::uint32_t> tmp(buf.size());
  return merge_count(buf, tmp, 0, buf.size());
}

CycleCounts cycle_counts(const Permutation& w) {
  const std::size_t n = w.size();
  CycleCounts counts(n);
  std::vector<bool> visited(n + 1, false);
  for (std::size_t start = 1; start <= n; ++start) {
    if (visited[start]) continue;
    std::size_t len = 0;
    for (std::size_t j = start; !visited[j]; j = w(j)) {
      visited[j] = true;
      ++len;
    }
    counts.add_cycle(len);
  }
  return counts;
}

Permutation reverse(const Permutation& w) {
  std::vector<Permutation::value_type> v(w.image().rbegin(), w.image().rend());
  return Permutation::from_trusted(std::move(v));
}

Permutation relative_order(std::span<const std::int64_t> values) {
  return rank_replace(values);
}

Permutation relative_order(std::span<const std::uint32_t> values) {
  return rank_replace(values);
}

std::string to_one_line(const Permutation& w) {
  std::string out;
  out.reserve(w.size() * 4);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(w.image()[i]);
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const Permutation& w) {
  return os << '[' << to_one_line(w) << ']';
}

// Mallows weights -------------------------------------------------------------

long double log_mallows_normalizer(std::size_t n, double q) {
  if (!(q > 0)) throw BadParameter("Mallows parameter q must be positive");
  const long double lq = std::log(static_cast<long double>(q));
  long double acc = 0;
  for (std::size_t k = 2; k <= n; ++k) {
    if (q == 1.0) {
      acc += std::log(static_cast<long double>(k));
    } else if (q < 1.0) {
      // (1 - q^k) / (1 - q)
      acc += std::log1p(-std::exp(lq * static_cast<long double>(k))) -
             std::log1p(-static_cast<long double>(q));
    } else {
      // q^{k-1} (1 - q^{-k}) / (1 - q^{-1})
      acc += lq * static_cast<long double>(k - 1) +
             std::log1p(-std::exp(-lq * static_cast<long double>(k))) -
             std::log1p(-1.0L / static_cast<long double>(q));
    }
  }
  return acc;
}

long double mallows_normalizer(std::size_t n, double q) {
  if (!(q > 0)) throw BadParameter("Mallows parameter q must be positive");
  if (n > 300 || q > 1.0) return std::exp(log_mallows_normalizer(n, q));
  long double z = 1;
  long double partial = 1;  // 1 + q + ... + q^{k-1}
  long double power = 1;
  for (std::size_t k = 2; k <= n; ++k) {
    power *= q;
    partial += power;
    z *= partial;
  }
  return z;
}

long double ExactDistribution::total_probability() const noexcept {
  long double s = 0;
  for (const auto& e : entries) s += e.probability;
  return s;
}

ExactDistribution exact_distribution(std::size_t n, double q, std::size_t cap) {
  if (n > cap) {
    throw TooLarge("exact_distribution: n = " + std::to_string(n) +
                   " exceeds oracle cap " + std::to_string(cap));
  }
  if (!(q > 0)) throw BadParameter("Mallows parameter q must be positive");
  ExactDistribution dist;
  dist.n = n;
  dist.q = q;
  const long double log_z = log_mallows_normalizer(n, q);
  const long double lq = std::log(static_cast<long double>(q));

  std::vector<Permutation::value_type> v(n);
  std::iota(v.begin(), v.end(), Permutation::value_type{1});
  do {
    ExactEntry e;
    e.perm = Permutation::from_trusted(v);
    e.inversions = inversions(e.perm);
    e.probability = std::exp(lq * static_cast<long double>(e.inversions) - log_z);
    dist.entries.push_back(std::move(e));
  } while (std::next_permutation(v.begin(), v.end()));
  return dist;
}

std::vector<long double> exact_expectation(const ExactDistribution& dist,
                                           const PermutationStatistic& statistic) {
  std::vector<long double> acc;
  for (const auto& e : dist.entries) {
    const auto value = statistic(e.perm);
    if (acc.empty()) acc.assign(value.size(), 0.0L);
    for (std::size_t k = 0; k < value.size() && k < acc.size(); ++k) {
      acc[k] += e.probability * static_cast<long double>(value[k]);
    }
  }
  return acc;
}

std::vector<long double> exact_expectation(std::size_t n, double q,
                                           const PermutationStatistic& statistic,
                                           std::size_t cap) {
  return exact_expectation(exact_distribution(n, q, cap), statistic);
}

void write_csv(std::ostream& os, const ExactDistribution& dist) {
  os << "perm,inversions,probability\n";
  std::ostringstream line;
  line.precision(21);
  for (const auto& e : dist.entries) {
    line.str({});
    line << '"' << to_one_line(e.perm) << "\"," << e.inversions << ',' << e.probability << '\n';
    os << line.str();
  }
}

}  // namespace mallows
