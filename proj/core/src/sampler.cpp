#include "mallows/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mallows/errors.hpp"
#include "mallows/order_statistic_tree.hpp"

namespace mallows {

namespace {

void require_positive(double q) {
  if (!(q > 0) || !std::isfinite(q)) throw BadParameter("Mallows parameter q must be positive");
}

// Rank in {1..m} with P(k) ∝ q^{k-1} where log_q = log q < 0.
std::size_t truncated_geometric_below_one(std::size_t m, double u, double log_q) {
  const double scaled = static_cast<double>(m) * log_q;
  // 1 - q^m; exactly 1 once q^m underflows.
  const double mass = scaled < -745.0 ? 1.0 : -std::expm1(scaled);
  const double x = std::log1p(-u * mass) / log_q;
  const double k = std::ceil(x);
  if (!(k >= 1.0)) return 1;
  if (k >= static_cast<double>(m)) return m;
  return static_cast<std::size_t>(k);
}

}  // namespace

std::uint64_t geometric(double q, RngStream& rng) {
  if (!(q > 0.0 && q < 1.0)) throw BadParameter("geometric: q must lie in (0, 1)");
  const double x = std::log1p(-rng.uniform()) / std::log(q);
  const double k = std::ceil(x);
  if (!(k >= 1.0)) return 1;  // u = 0
  if (k >= 9.0e18) return std::numeric_limits<std::uint64_t>::max() / 2;
  return static_cast<std::uint64_t>(k);
}

std::size_t truncated_geometric(double q, std::size_t m, RngStream& rng) {
  require_positive(q);
  if (m == 0) throw BadParameter("truncated_geometric: empty support");
  const double u = rng.uniform();
  if (q == 1.0) return std::min(m, 1 + static_cast<std::size_t>(u * static_cast<double>(m)));
  if (q < 1.0) return truncated_geometric_below_one(m, u, std::log(q));
  // Weights increase with k: reflect onto parameter 1/q.
  return m + 1 - truncated_geometric_below_one(m, u, -std::log(q));
}

Permutation sample_finite(std::size_t n, double q, RngStream& rng) {
  require_positive(q);
  OrderStatisticTree unused(n);
  std::vector<Permutation::value_type> image(n);
  const double log_q = std::log(q);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t m = n - i;
    const double u = rng.uniform();
    std::size_t k;
    if (q == 1.0) {
      k = std::min(m, 1 + static_cast<std::size_t>(u * static_cast<double>(m)));
    } else if (q < 1.0) {
      k = truncated_geometric_below_one(m, u, log_q);
    } else {
      k = m + 1 - truncated_geometric_below_one(m, u, -log_q);
    }
    const std::size_t value = unused.select(k);
    unused.remove(value);
    image[i] = static_cast<Permutation::value_type>(value);
  }
  return Permutation::from_trusted(std::move(image));
}

// ProcessGenerator --------------------------------------------------------------

std::uint32_t ProcessGenerator::step(std::uint64_t rank) {
  ++time_;
  if (rank <= gaps_.size()) {
    const auto it = gaps_.begin() + static_cast<std::ptrdiff_t>(rank - 1);
    const std::uint32_t value = *it;
    gaps_.erase(it);
    return value;
  }
  const std::uint64_t above = rank - gaps_.size();
  const auto value = static_cast<std::uint32_t>(max_ + above);
  for (std::uint32_t v = max_ + 1; v < value; ++v) gaps_.push_back(v);
  max_ = value;
  return value;
}

void ProcessGenerator::reset() noexcept {
  gaps_.clear();
  max_ = 0;
  time_ = 0;
}

ProcessPrefix sample_process_prefix(double q, std::size_t t, RngStream& rng) {
  if (!(q > 0.0 && q < 1.0)) throw BadParameter("sample_process_prefix: q must lie in (0, 1)");
  if (t == 0) throw BadParameter("sample_process_prefix: horizon must be positive");
  ProcessPrefix prefix;
  prefix.q = q;
  prefix.values.reserve(t);
  prefix.ranks.reserve(t);
  ProcessGenerator process;
  for (std::size_t i = 0; i < t; ++i) {
    const std::uint64_t z = geometric(q, rng);
    prefix.ranks.push_back(z);
    prefix.values.push_back(process.step(z));
  }
  return prefix;
}

}  // namespace mallows
