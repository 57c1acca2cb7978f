#include "mallows/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mallows/errors.hpp"
#include "mallows/regenerative.hpp"
#include "mallows/statistics.hpp"

namespace mallows {

namespace {

constexpr std::size_t kMaxSeriesTerms = 1'000'000;

void require_below_one(double q, const char* what) {
  if (!(q > 0.0 && q < 1.0)) throw BadParameter(std::string(what) + ": q must lie in (0, 1)");
}

}  // namespace

QSeriesValue q_pochhammer(double a, double q, std::optional<std::size_t> terms, double tol) {
  QSeriesValue out;
  out.value = 1.0;
  if (terms) {
    double power = 1.0;  // q^i
    for (std::size_t i = 0; i < *terms; ++i) {
      out.value *= 1.0 - a * power;
      power *= q;
    }
    out.terms_used = *terms;
    return out;
  }
  if (!(std::abs(q) < 1.0)) throw Diverges("q_pochhammer: infinite product needs |q| < 1");
  if (a == 0.0) return out;

  // Once s = Σ_{i>=I} |a q^i| <= 1/2, |log Π_{i>=I}(1 - a q^i)| <= 2s, so the
  // discarded factor differs from 1 by at most e^{2s} - 1. Stop only when both
  // the relative and the absolute error are below tol: the product itself can
  // be far below tol for q near 1.
  const double aq = std::abs(q);
  double power = 1.0;
  for (std::size_t i = 0; i < kMaxSeriesTerms; ++i) {
    out.value *= 1.0 - a * power;
    power *= q;
    out.terms_used = i + 1;
    const double s = std::abs(a) * std::abs(power) / (1.0 - aq);
    if (s <= 0.5) {
      const double relative = std::expm1(2.0 * s);
      out.truncation_bound = std::abs(out.value) * relative;
      if ((relative <= tol && out.truncation_bound <= tol) || power == 0.0) return out;
    }
  }
  return out;
}

namespace {

StationaryLaw stationary_mu_fixed(double q, std::size_t j_max, double tol) {
  require_below_one(q, "stationary_mu");
  StationaryLaw law;
  law.normalizer = q_pochhammer(q, q, std::nullopt, 1e-18).value;
  law.pmf.resize(j_max + 1);
  double mu = law.normalizer;
  double power = 1.0;  // q^{j}
  for (std::size_t j = 0; j <= j_max; ++j) {
    law.pmf[j] = mu;
    power *= q;
    mu *= q / (1.0 - power);  // mu_{j+1} / mu_j = q / (1 - q^{j+1})
  }
  // Ratios q / (1 - q^{j+1}) decrease in j, so for j > j_max the tail is
  // dominated by a geometric series with the ratio at j_max.
  const double ratio = q / (1.0 - std::pow(q, static_cast<double>(j_max + 1)));
  law.tail_bound = ratio < 1.0 ? law.pmf[j_max] * ratio / (1.0 - ratio)
                               : std::numeric_limits<double>::infinity();
  if (!(law.tail_bound < tol)) {
    throw BadParameter("stationary_mu: tail beyond j_max = " + std::to_string(j_max) +
                       " is not below tolerance");
  }
  return law;
}

}  // namespace

StationaryLaw stationary_mu(double q, std::optional<std::size_t> fixed_j_max, double tol) {
  if (fixed_j_max) return stationary_mu_fixed(q, *fixed_j_max, tol);
  require_below_one(q, "stationary_mu");
  for (std::size_t j_max = 16;; j_max *= 2) {
    try {
      StationaryLaw law = stationary_mu_fixed(q, j_max, tol);
      // Trim to the smallest certified support.
      while (law.pmf.size() > 1) {
        const std::size_t j = law.pmf.size() - 2;
        const double ratio = q / (1.0 - std::pow(q, static_cast<double>(j + 1)));
        if (!(ratio < 1.0)) break;
        const double bound = law.pmf[j] * ratio / (1.0 - ratio);
        if (!(bound < tol)) break;
        law.pmf.pop_back();
        law.tail_bound = bound;
      }
      return law;
    } catch (const BadParameter&) {
      if (j_max > (std::size_t{1} << 24)) throw;
    }
  }
}

QSeriesValue alpha1(double q, double tol) {
  require_below_one(q, "alpha1");
  const double log_q = std::log(q);
  const double prefactor = (1.0 - q) / q * q_pochhammer(q, q, std::nullopt, 1e-18).value;

  auto term = [&](std::size_t j, double poch_j) {
    const double e = static_cast<double>(j + 1);
    return std::exp(e * e * log_q) / (poch_j * poch_j);
  };

  QSeriesValue out;
  double sum = 0.0;
  double poch = 1.0;  // (q;q)_j
  std::size_t j = 0;
  double next = term(0, poch);
  for (; j < kMaxSeriesTerms; ++j) {
    sum += next;
    poch *= 1.0 - std::pow(q, static_cast<double>(j + 1));
    next = term(j + 1, poch);
    if (next < tol * sum || next == 0.0) break;
  }
  out.terms_used = j + 1;
  // Term ratios q^{2j+3} / (1 - q^{j+1})^2 decrease, so the discarded tail is
  // at most next / (1 - ratio at the first discarded term).
  const double poch_next = poch * (1.0 - std::pow(q, static_cast<double>(j + 2)));
  const double ratio = next > 0.0 ? term(j + 2, poch_next) / next : 0.0;
  const double tail = ratio < 1.0 ? next / (1.0 - ratio) : std::numeric_limits<double>::infinity();
  out.value = prefactor * sum;
  out.truncation_bound = prefactor * tail;
  return out;
}

// Block estimators ---------------------------------------------------------------------

BlockFeatureSums::BlockFeatureSums(std::size_t features)
    : sum_x_(features, 0), sum_xt_(features, 0), sum_xx_(features * features, 0) {}

void BlockFeatureSums::add(double length, std::span<const double> x) {
  const std::size_t f = sum_x_.size();
  ++n_;
  const long double t = length;
  sum_t_ += t;
  sum_tt_ += t * t;
  for (std::size_t k = 0; k < f; ++k) {
    const long double xk = x[k];
    sum_x_[k] += xk;
    sum_xt_[k] += xk * t;
    if (xk == 0) continue;
    for (std::size_t l = k; l < f; ++l) sum_xx_[k * f + l] += xk * static_cast<long double>(x[l]);
  }
}

void BlockFeatureSums::merge(const BlockFeatureSums& o) {
  if (sum_x_.empty()) {
    *this = o;
    return;
  }
  n_ += o.n_;
  sum_t_ += o.sum_t_;
  sum_tt_ += o.sum_tt_;
  for (std::size_t k = 0; k < sum_x_.size(); ++k) {
    sum_x_[k] += o.sum_x_[k];
    sum_xt_[k] += o.sum_xt_[k];
  }
  for (std::size_t k = 0; k < sum_xx_.size(); ++k) sum_xx_[k] += o.sum_xx_[k];
}

double BlockFeatureSums::mean_length() const {
  return n_ ? static_cast<double>(sum_t_ / static_cast<long double>(n_)) : 0.0;
}

double BlockFeatureSums::alpha(std::size_t k) const {
  return sum_t_ > 0 ? static_cast<double>(sum_x_[k] / sum_t_) : 0.0;
}

double BlockFeatureSums::beta(std::size_t k, std::size_t l) const {
  if (n_ < 2 || sum_t_ <= 0) return 0.0;
  if (k > l) std::swap(k, l);
  const std::size_t f = sum_x_.size();
  const long double n = static_cast<long double>(n_);
  const long double mt = sum_t_ / n;
  const long double ak = sum_x_[k] / sum_t_;
  const long double al = sum_x_[l] / sum_t_;
  // Σ (x_k - a_k t)(x_l - a_l t); both centred variables have mean exactly 0.
  const long double s = sum_xx_[k * f + l] - al * sum_xt_[k] - ak * sum_xt_[l] + ak * al * sum_tt_;
  return static_cast<double>(s / (n - 1) / mt);
}

ConstantsReport summarize_blocks(ConstantsRoute route, double q, std::size_t i_max,
                                 const std::vector<BlockFeatureSums>& per_chunk,
                                 const MonteCarloPlan& plan) {
  BlockFeatureSums all(i_max + 2);
  for (const auto& c : per_chunk) all.merge(c);

  std::vector<const BlockFeatureSums*> batches;
  for (const auto& c : per_chunk) {
    if (c.count() >= 2) batches.push_back(&c);
  }
  auto se_of = [&](auto&& f) {
    std::vector<double> v;
    v.reserve(batches.size());
    for (const auto* b : batches) v.push_back(f(*b));
    return batch_mean(v).standard_error;
  };

  const std::size_t total_idx = i_max;
  const std::size_t tail_idx = i_max + 1;

  ConstantsReport r;
  r.route = route;
  r.q = q;
  r.i_max = i_max;
  r.mu = {all.mean_length(), se_of([](const BlockFeatureSums& b) { return b.mean_length(); })};
  for (std::size_t i = 0; i < i_max; ++i) {
    r.alpha.push_back({all.alpha(i), se_of([i](const BlockFeatureSums& b) { return b.alpha(i); })});
  }
  r.alpha_tail_points = {all.alpha(tail_idx),
                         se_of([&](const BlockFeatureSums& b) { return b.alpha(tail_idx); })};
  r.alpha_total = {all.alpha(total_idx),
                   se_of([&](const BlockFeatureSums& b) { return b.alpha(total_idx); })};
  r.beta_total = {all.beta(total_idx, total_idx),
                  se_of([&](const BlockFeatureSums& b) { return b.beta(total_idx, total_idx); })};
  r.beta.assign(i_max, std::vector<double>(i_max, 0.0));
  r.beta_se.assign(i_max, std::vector<double>(i_max, 0.0));
  for (std::size_t i = 0; i < i_max; ++i) {
    for (std::size_t j = i; j < i_max; ++j) {
      const double b = all.beta(i, j);
      const double se = se_of([i, j](const BlockFeatureSums& s) { return s.beta(i, j); });
      r.beta[i][j] = r.beta[j][i] = b;
      r.beta_se[i][j] = r.beta_se[j][i] = se;
    }
  }
  r.sample_count = all.count();
  r.seed = plan.seed;
  r.chunks = per_chunk.size();
  r.workers = plan.workers;
  return r;
}

namespace {

// [C_{step}, C_{2 step}, ..., C_{i_max step}, C, Σ_{longer} len·C_len]
void fill_features(const CycleCounts& cc, std::size_t i_max, std::size_t step,
                   std::vector<double>& out) {
  out.assign(i_max + 2, 0.0);
  for (std::size_t i = 1; i <= i_max; ++i) out[i - 1] = static_cast<double>(cc.of(i * step));
  out[i_max] = static_cast<double>(cc.total());
  double tail = 0;
  for (std::size_t len = i_max * step + 1; len <= cc.max_length(); ++len) {
    tail += static_cast<double>(len * cc.of(len));
  }
  out[i_max + 1] = tail;
}

}  // namespace

ConstantsReport estimate_renewal_constants(double q, std::size_t num_excursions,
                                           std::size_t i_max, const MonteCarloPlan& plan) {
  require_below_one(q, "estimate_renewal_constants");
  if (i_max == 0) throw BadParameter("estimate_renewal_constants: i_max must be positive");
  auto per_chunk = run_partitioned(plan, num_excursions, [&](std::size_t, std::size_t share, RngStream& rng) {
    BlockFeatureSums sums(i_max + 2);
    if (share == 0) return sums;
    std::vector<double> features;
    for_each_excursion(q, share, rng, [&](const Excursion& e) {
      fill_features(cycle_counts(e.block), i_max, 1, features);
      sums.add(static_cast<double>(e.length()), features);
    });
    return sums;
  });
  return summarize_blocks(ConstantsRoute::renewal, q, i_max, per_chunk, plan);
}

ConstantsReport estimate_symmetric_constants(double q, std::size_t num_blocks, std::size_t i_max,
                                             const MonteCarloPlan& plan, std::size_t ambient_n) {
  if (!(q > 1.0)) throw BadParameter("estimate_symmetric_constants: q must exceed 1");
  if (i_max == 0) throw BadParameter("estimate_symmetric_constants: i_max must be positive");
  auto per_chunk = run_partitioned(plan, num_blocks, [&](std::size_t, std::size_t share, RngStream& rng) {
    BlockFeatureSums sums(i_max + 2);
    std::vector<double> features;
    for (std::size_t samples = 0; sums.count() < share; ++samples) {
      if (samples > 1000 && sums.count() == 0) {
        throw BadParameter("estimate_symmetric_constants: ambient size too small to yield interior blocks");
      }
      sample_symmetric_blocks(q, ambient_n, 1, rng, [&](const SymmetricBlock& b, Parity) {
        if (b.kind != SymmetricKind::pair || sums.count() >= share) return;
        fill_features(cycle_counts(b.block), i_max, 2, features);
        sums.add(static_cast<double>(b.length()), features);
      });
    }
    return sums;
  });
  return summarize_blocks(ConstantsRoute::symmetric, q, i_max, per_chunk, plan);
}

}  // namespace mallows
