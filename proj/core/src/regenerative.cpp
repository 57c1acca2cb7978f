#include "mallows/regenerative.hpp"

#include <algorithm>
#include <string>

#include "mallows/errors.hpp"

namespace mallows {

namespace {

void require_below_one(double q, const char* what) {
  if (!(q > 0.0 && q < 1.0)) throw BadParameter(std::string(what) + ": q must lie in (0, 1)");
}

// Relabels w restricted to the ascending position list `positions` (which is
// closed under w) to a permutation of {1..positions.size()}.
Permutation restrict_to(const Permutation& w, const std::vector<std::size_t>& positions,
                        const std::vector<std::uint32_t>& index_of) {
  std::vector<Permutation::value_type> image(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) image[i] = index_of[w(positions[i])];
  return Permutation::from_trusted(std::move(image));
}

}  // namespace

std::uint64_t chain_step(std::uint64_t m, std::uint64_t z) noexcept {
#ifdef MALLOWS_MUTATE_CHAIN_STEP
  return std::max(m, z) + 1;
#else
  return std::max(m, z) - 1;
#endif
}

PairState chain_step(PairState s, std::uint64_t z, std::uint64_t z_prime) noexcept {
  return {chain_step(s.m, z), chain_step(s.m_prime, z_prime)};
}

std::uint64_t single_return_time(double q, RngStream& rng, std::uint64_t cap) {
  require_below_one(q, "single_return_time");
  std::uint64_t m = 0;
  for (std::uint64_t t = 1;; ++t) {
    m = chain_step(m, geometric(q, rng));
    if (m == 0) return t;
    if (t >= cap) throw ExcursionTooLong("excursion exceeded " + std::to_string(cap) + " steps");
  }
}

std::vector<std::uint64_t> excursion_lengths(double q, std::size_t count, RngStream& rng,
                                             std::uint64_t cap) {
  std::vector<std::uint64_t> out(count);
  for (auto& t : out) t = single_return_time(q, rng, cap);
  return out;
}

std::uint64_t pair_return_time(double q, RngStream& rng, std::uint64_t cap) {
  require_below_one(q, "pair_return_time");
  PairState s;
  for (std::uint64_t t = 1;; ++t) {
    const std::uint64_t z = geometric(q, rng);
    const std::uint64_t z_prime = geometric(q, rng);
    s = chain_step(s, z, z_prime);
    if (s.at_origin()) return t;
    if (t >= cap) throw ReturnTooLong("pair chain return exceeded " + std::to_string(cap) + " steps");
  }
}

std::vector<std::uint64_t> pair_chain_return_times(double q, std::size_t count, RngStream& rng,
                                                   std::uint64_t cap) {
  if (count == 0) throw BadParameter("pair_chain_return_times: count must be positive");
  std::vector<std::uint64_t> out(count);
  for (auto& t : out) t = pair_return_time(q, rng, cap);
  return out;
}

std::vector<double> Occupation::pmf() const {
  std::vector<double> p(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) {
    p[j] = steps ? static_cast<double>(counts[j]) / static_cast<double>(steps) : 0.0;
  }
  return p;
}

Occupation occupation_distribution(double q, std::uint64_t steps, std::uint64_t burn_in,
                                   RngStream& rng) {
  require_below_one(q, "occupation_distribution");
  std::uint64_t m = 0;
  for (std::uint64_t t = 0; t < burn_in; ++t) m = chain_step(m, geometric(q, rng));
  Occupation occ;
  occ.steps = steps;
  for (std::uint64_t t = 0; t < steps; ++t) {
    m = chain_step(m, geometric(q, rng));
    if (m >= occ.counts.size()) occ.counts.resize(m + 1, 0);
    ++occ.counts[m];
  }
  return occ;
}

// Cuts ------------------------------------------------------------------------------

std::vector<std::size_t> additive_cuts(std::span<const std::uint32_t> values) {
  std::vector<std::size_t> cuts;
  std::uint32_t running_max = 0;
  for (std::size_t k = 1; k <= values.size(); ++k) {
    running_max = std::max(running_max, values[k - 1]);
    if (running_max == k) cuts.push_back(k);
  }
  return cuts;
}

std::vector<std::size_t> antiadditive_cuts(const Permutation& w) {
  // k values w(1..k) all >= n-k+1 force w([1,k]) = [n-k+1,n]; likewise for the tail.
  std::vector<std::size_t> cuts;
  const std::size_t n = w.size();
  std::size_t head_min = n + 1;
  std::size_t tail_max = 0;
  for (std::size_t k = 1; 2 * k <= n; ++k) {
    head_min = std::min<std::size_t>(head_min, w(k));
    tail_max = std::max<std::size_t>(tail_max, w(n - k + 1));
    if (head_min >= n - k + 1 && tail_max <= k) cuts.push_back(k);
  }
  return cuts;
}

bool is_pair_block(const Permutation& block) {
  const std::size_t s = block.size();
  if (s == 0 || s % 2 != 0) return false;
  const std::size_t d = s / 2;
  for (std::size_t i = 1; i <= s; ++i) {
    const bool left = i <= d;
    const bool lands_left = block(i) <= d;
    if (left == lands_left) return false;
  }
  return true;
}

// Decompositions ----------------------------------------------------------------------

Decomposition decompose_additive(const Permutation& w) {
  Decomposition d;
  d.kind = DecompositionKind::additive;
  d.source = w;
  d.cut_points = additive_cuts(w);
  std::size_t start = 0;
  for (std::size_t cut : d.cut_points) {
    std::vector<Permutation::value_type> image(cut - start);
    for (std::size_t i = start + 1; i <= cut; ++i) {
      image[i - start - 1] = static_cast<Permutation::value_type>(w(i) - start);
    }
    d.blocks.push_back({BlockKind::excursion, Permutation::from_trusted(std::move(image)), false});
    start = cut;
  }
  return d;
}

Decomposition decompose_antiadditive(const Permutation& w) {
  Decomposition d;
  d.kind = DecompositionKind::antiadditive;
  d.source = w;
  d.cut_points = antiadditive_cuts(w);
  const std::size_t n = w.size();
  std::vector<std::uint32_t> index_of(n + 1, 0);
  std::vector<std::size_t> positions;

  std::size_t outer = 0;
  for (std::size_t cut : d.cut_points) {
    positions.clear();
    for (std::size_t i = outer + 1; i <= cut; ++i) positions.push_back(i);
    for (std::size_t i = n - cut + 1; i <= n - outer; ++i) positions.push_back(i);
    for (std::size_t i = 0; i < positions.size(); ++i) {
      index_of[positions[i]] = static_cast<std::uint32_t>(i + 1);
    }
    d.blocks.push_back({BlockKind::pair, restrict_to(w, positions, index_of), false});
    outer = cut;
  }
  positions.clear();
  for (std::size_t i = outer + 1; i <= n - outer; ++i) {
    index_of[i] = static_cast<std::uint32_t>(i - outer);
    positions.push_back(i);
  }
  d.blocks.push_back({BlockKind::central, restrict_to(w, positions, index_of), false});
  return d;
}

Decomposition decompose_prefix(const ProcessPrefix& prefix) {
  Decomposition d;
  d.kind = DecompositionKind::additive;
  d.source = relative_order(std::span<const std::uint32_t>(prefix.values));
  d.cut_points = additive_cuts(prefix.values);
  std::size_t start = 0;
  for (std::size_t cut : d.cut_points) {
    std::vector<Permutation::value_type> image(cut - start);
    for (std::size_t i = start; i < cut; ++i) {
      image[i - start] = static_cast<Permutation::value_type>(prefix.values[i] - start);
    }
    d.blocks.push_back({BlockKind::excursion, Permutation::from_trusted(std::move(image)), false});
    start = cut;
  }
  if (start < prefix.values.size()) {
    std::span<const std::uint32_t> rest(prefix.values.data() + start, prefix.values.size() - start);
    d.blocks.push_back({BlockKind::excursion, relative_order(rest), true});
  }
  return d;
}

Permutation Decomposition::reassemble() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.length();
  std::vector<Permutation::value_type> image(n);

  if (kind == DecompositionKind::additive) {
    std::size_t offset = 0;
    for (const auto& b : blocks) {
      for (std::size_t i = 1; i <= b.length(); ++i) {
        image[offset + i - 1] = static_cast<Permutation::value_type>(offset + b.perm(i));
      }
      offset += b.length();
    }
    return Permutation(std::move(image));
  }

  std::size_t outer = 0;
  std::vector<std::size_t> positions;
  for (const auto& b : blocks) {
    if (b.kind == BlockKind::pair) {
      const std::size_t half = b.length() / 2;
      positions.clear();
      for (std::size_t i = outer + 1; i <= outer + half; ++i) positions.push_back(i);
      for (std::size_t i = n - outer - half + 1; i <= n - outer; ++i) positions.push_back(i);
      for (std::size_t i = 0; i < positions.size(); ++i) {
        image[positions[i] - 1] = static_cast<Permutation::value_type>(positions[b.perm(i + 1) - 1]);
      }
      outer += half;
    } else {
      for (std::size_t i = 1; i <= b.length(); ++i) {
        image[outer + i - 1] = static_cast<Permutation::value_type>(outer + b.perm(i));
      }
    }
  }
  return Permutation(std::move(image));
}

// Samplers ----------------------------------------------------------------------------

void for_each_excursion(double q, std::size_t count, RngStream& rng, const ExcursionSink& sink,
                        std::uint64_t cap) {
  require_below_one(q, "sample_excursions");
  if (count == 0) throw BadParameter("sample_excursions: count must be positive");
  ProcessGenerator process;
  std::vector<Permutation::value_type> image;
  for (std::size_t e = 0; e < count; ++e) {
    // After a renewal the process restarts afresh, so each excursion is
    // generated from an empty state; values are already {1..T}.
    process.reset();
    image.clear();
    do {
      image.push_back(process.step(geometric(q, rng)));
      if (image.size() > cap && process.pending() != 0) {
        throw ExcursionTooLong("excursion exceeded " + std::to_string(cap) + " steps");
      }
    } while (process.pending() != 0);
    sink(Excursion{Permutation::from_trusted(image)});
  }
}

std::vector<Excursion> sample_excursions(double q, std::size_t count, RngStream& rng,
                                         std::uint64_t cap) {
  std::vector<Excursion> out;
  out.reserve(count);
  for_each_excursion(q, count, rng, [&](const Excursion& e) { out.push_back(e); }, cap);
  return out;
}

void sample_symmetric_blocks(double q, std::size_t n, std::size_t reps, RngStream& rng,
                             const SymmetricSink& sink) {
  if (!(q > 1.0)) throw BadParameter("sample_symmetric_blocks: q must exceed 1");
  const Parity parity = parity_of(n);
  for (std::size_t r = 0; r < reps; ++r) {
    const Decomposition d = decompose_antiadditive(sample_finite(n, q, rng));
    // Pair blocks whose outer edge lies in the outer quarter: a stopping-time
    // selection, so block sums obey Wald's identity. Blocks near the centre
    // are excluded because the window end selects for short ones.
    const std::size_t pairs = d.blocks.size() - 1;
    std::size_t outer = 0;
    for (std::size_t i = 0; i < pairs && outer < n / 4; ++i) {
      if (i > 0) sink(SymmetricBlock{SymmetricKind::pair, d.blocks[i].perm}, parity);
      outer += d.blocks[i].length() / 2;
    }
    sink(SymmetricBlock{SymmetricKind::central, d.blocks.back().perm}, parity);
  }
}

SymmetricHarvest harvest_symmetric_blocks(double q, std::size_t n, std::size_t reps,
                                          RngStream& rng) {
  SymmetricHarvest h;
  h.parity = parity_of(n);
  sample_symmetric_blocks(q, n, reps, rng, [&](const SymmetricBlock& b, Parity) {
    if (b.kind == SymmetricKind::pair) {
      h.pairs.push_back(b);
    } else {
      h.centrals.push_back(b.block);
    }
  });
  return h;
}

std::vector<std::uint64_t> covering_block_lengths(double q, std::uint64_t n, std::size_t reps,
                                                  RngStream& rng, std::uint64_t cap) {
  if (!(q > 0) || q == 1.0) throw BadParameter("covering_block_length: q must be positive and != 1");
  if (n == 0) throw BadParameter("covering_block_length: position must be positive");
  const bool symmetric = q > 1.0;
  const double chain_q = symmetric ? 1.0 / q : q;
  std::vector<std::uint64_t> out;
  out.reserve(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    std::uint64_t elapsed = 0;
    for (;;) {
      const std::uint64_t len =
          symmetric ? pair_return_time(chain_q, rng, cap) : single_return_time(chain_q, rng, cap);
      if (elapsed + len >= n) {
        out.push_back(symmetric ? 2 * len : len);
        break;
      }
      elapsed += len;
    }
  }
  return out;
}

}  // namespace mallows
