#include "mallows/statistics.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>

#include "mallows/errors.hpp"

namespace mallows {

void RunningMoments::add(double x) noexcept {
  RunningMoments one;
  one.n_ = 1;
  one.mean_ = x;
  merge(one);
}

void RunningMoments::merge(const RunningMoments& o) noexcept {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double d = o.mean_ - mean_;
  const double d2 = d * d;
  const double m2 = m2_ + o.m2_ + d2 * na * nb / n;
  const double m3 = m3_ + o.m3_ + d * d2 * na * nb * (na - nb) / (n * n) +
                    3.0 * d * (na * o.m2_ - nb * m2_) / n;
  const double m4 = m4_ + o.m4_ + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                    6.0 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n) +
                    4.0 * d * (na * o.m3_ - nb * m3_) / n;
  n_ += o.n_;
  mean_ += d * nb / n;
  m2_ = m2;
  m3_ = m3;
  m4_ = m4;
}

double RunningMoments::variance() const noexcept {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningMoments::standard_error() const noexcept {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double RunningMoments::skewness() const noexcept {
  if (n_ < 2 || m2_ <= 0) return 0.0;
  const double n = static_cast<double>(n_);
  return std::sqrt(n) * m3_ / std::pow(m2_, 1.5);
}

double RunningMoments::excess_kurtosis() const noexcept {
  if (n_ < 2 || m2_ <= 0) return 0.0;
  const double n = static_cast<double>(n_);
  return n * m4_ / (m2_ * m2_) - 3.0;
}

double RunningMoments::variance_standard_error() const noexcept {
  if (n_ < 2) return 0.0;
  const double n = static_cast<double>(n_);
  const double mu2 = m2_ / n;
  const double mu4 = m4_ / n;
  return std::sqrt(std::max(0.0, mu4 - mu2 * mu2) / n);
}

EstimateReport make_estimate(std::string name, const RunningMoments& m, std::uint64_t seed,
                             std::size_t chunks) {
  EstimateReport r;
  r.name = std::move(name);
  r.mean = m.mean();
  r.variance = m.variance();
  r.standard_error = m.standard_error();
  r.count = m.count();
  r.seed = seed;
  r.chunks = chunks;
  return r;
}

RatioEstimate ratio_estimate(std::span<const double> num, std::span<const double> den) {
  if (num.size() != den.size() || num.empty()) throw BadParameter("ratio_estimate: size mismatch");
  const double n = static_cast<double>(num.size());
  const double mx = std::accumulate(num.begin(), num.end(), 0.0) / n;
  const double my = std::accumulate(den.begin(), den.end(), 0.0) / n;
  const double r = mx / my;
  double ss = 0;
  for (std::size_t i = 0; i < num.size(); ++i) {
    const double e = num[i] - r * den[i];
    ss += e * e;
  }
  const double var = num.size() > 1 ? ss / (n - 1) : 0.0;
  return {r, std::sqrt(var / n) / std::abs(my)};
}

RatioEstimate batch_mean(std::span<const double> batches) {
  if (batches.empty()) return {};
  const double k = static_cast<double>(batches.size());
  const double m = std::accumulate(batches.begin(), batches.end(), 0.0) / k;
  if (batches.size() < 2) return {m, 0.0};
  double ss = 0;
  for (double b : batches) ss += (b - m) * (b - m);
  return {m, std::sqrt(ss / (k - 1) / k)};
}

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double ks_distance_to_fitted_normal(std::span<const double> values, bool lattice) {
  const std::size_t n = values.size();
  if (n < 2) return 1.0;
  RunningMoments m;
  for (double v : values) m.add(v);
  const double mu = m.mean();
  const double sd = std::sqrt(m.variance());
  if (!(sd > 0)) return 1.0;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double nn = static_cast<double>(n);
  double d = 0;
  if (!lattice) {
    for (std::size_t i = 0; i < n; ++i) {
      const double f = normal_cdf((sorted[i] - mu) / sd);
      d = std::max({d, std::abs(static_cast<double>(i + 1) / nn - f),
                    std::abs(f - static_cast<double>(i) / nn)});
    }
    return d;
  }
  // The empirical CDF is constant between consecutive observed integers, so
  // the supremum over integers sits at the ends of each flat stretch.
  auto g = [&](double x) { return normal_cdf((x + 0.5 - mu) / sd); };
  d = g(sorted.front() - 1.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const double f = static_cast<double>(j) / nn;
    d = std::max(d, std::abs(f - g(sorted[i])));
    if (j < n && sorted[j] - 1.0 > sorted[i]) d = std::max(d, std::abs(f - g(sorted[j] - 1.0)));
    i = j;
  }
  return d;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  const std::size_t m = std::max(p.size(), q.size());
  double s = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = i < p.size() ? p[i] : 0.0;
    const double b = i < q.size() ? q[i] : 0.0;
    s += std::abs(a - b);
  }
  return 0.5 * s;
}

std::vector<double> pooled_pmf(std::span<const std::uint64_t> obs, std::uint64_t pool_at) {
  std::vector<double> pmf;
  if (obs.empty()) return pmf;
  std::uint64_t top = 0;
  for (auto v : obs) top = std::max(top, std::min(v, pool_at));
  std::vector<std::uint64_t> counts(top + 1, 0);
  for (auto v : obs) ++counts[std::min(v, pool_at)];
  pmf.reserve(counts.size());
  for (auto c : counts) pmf.push_back(static_cast<double>(c) / static_cast<double>(obs.size()));
  return pmf;
}

namespace {
double chi_square_upper_tail(double stat, std::size_t dof) {
  if (dof == 0) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(dist, stat));
}
}  // namespace

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> probabilities) {
  if (observed.size() != probabilities.size() || observed.empty()) {
    throw BadParameter("chi_square_gof: cell count mismatch");
  }
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
  ChiSquareResult r;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = probabilities[i] * total;
    if (e <= 0) continue;
    const double diff = static_cast<double>(observed[i]) - e;
    r.statistic += diff * diff / e;
    ++cells;
  }
  r.degrees_of_freedom = cells > 0 ? cells - 1 : 0;
  r.p_value = chi_square_upper_tail(r.statistic, r.degrees_of_freedom);
  return r;
}

ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                      std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) throw BadParameter("chi_square_two_sample: cell count mismatch");
  const double na = static_cast<double>(std::accumulate(a.begin(), a.end(), std::uint64_t{0}));
  const double nb = static_cast<double>(std::accumulate(b.begin(), b.end(), std::uint64_t{0}));
  const double ka = std::sqrt(nb / na);
  const double kb = std::sqrt(na / nb);
  ChiSquareResult r;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double s = static_cast<double>(a[i] + b[i]);
    if (s == 0) continue;
    const double diff = ka * static_cast<double>(a[i]) - kb * static_cast<double>(b[i]);
    r.statistic += diff * diff / s;
    ++cells;
  }
  r.degrees_of_freedom = cells > 0 ? cells - 1 : 0;
  r.p_value = chi_square_upper_tail(r.statistic, r.degrees_of_freedom);
  return r;
}

CovarianceEstimate sample_covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw BadParameter("sample_covariance: bad sizes");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxxyy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = (x[i] - mx) * (y[i] - my);
    sxy += p;
    sxxyy += p * p;
  }
  const double cov = sxy / (n - 1);
  const double pop = sxy / n;
  const double var = std::max(0.0, sxxyy / n - pop * pop) / n;
  return {cov, std::sqrt(var)};
}

}  // namespace mallows
