#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "mallows/constants.hpp"
#include "mallows/errors.hpp"
#include "mallows/regenerative.hpp"
#include "mallows/sampler.hpp"
#include "mallows/statistics.hpp"

using namespace mallows;
using testing::perm;

namespace {

using Cuts = std::vector<std::size_t>;

CycleCounts block_sum(const Decomposition& d) {
  CycleCounts s;
  for (const auto& b : d.blocks) s += cycle_counts(b.perm);
  return s;
}

bool only_even_cycles(const Permutation& w) {
  const auto cc = cycle_counts(w);
  for (std::size_t len = 1; len <= cc.max_length(); len += 2) {
    if (cc.of(len) != 0) return false;
  }
  return true;
}

// Times t in [1, horizon] at which the chain driven by the prefix ranks is 0.
Cuts chain_zeros(const ProcessPrefix& p) {
  Cuts zeros;
  std::uint64_t m = 0;
  for (std::size_t t = 0; t < p.horizon(); ++t) {
    m = chain_step(m, p.ranks[t]);
    if (m == 0) zeros.push_back(t + 1);
  }
  return zeros;
}

}  // namespace

TEST_CASE("chain_step") {
  CHECK(chain_step(std::uint64_t{0}, 1) == 0);
  CHECK(chain_step(std::uint64_t{0}, 3) == 2);
  CHECK(chain_step(std::uint64_t{5}, 2) == 4);
  PairState s;
  CHECK(s.at_origin());
  s = chain_step(s, 1, 4);
  CHECK(s == PairState{0, 3});
  CHECK_FALSE(s.at_origin());
}

TEST_CASE("additive_cuts") {
  CHECK(additive_cuts(Permutation::identity(4)) == Cuts{1, 2, 3, 4});
  CHECK(additive_cuts(perm({2, 1, 4, 3})) == Cuts{2, 4});
  CHECK(additive_cuts(perm({3, 1, 2})) == Cuts{3});
  CHECK(additive_cuts(Permutation{}).empty());
}

TEST_CASE("antiadditive_cuts") {
  CHECK(antiadditive_cuts(perm({4, 3, 2, 1})) == Cuts{1, 2});
  CHECK(antiadditive_cuts(Permutation::identity(4)).empty());
  CHECK(antiadditive_cuts(perm({3, 4, 1, 2})) == Cuts{2});
  CHECK(antiadditive_cuts(perm({5, 2, 3, 4, 1})) == Cuts{1});
  CHECK(antiadditive_cuts(perm({1})).empty());
  CHECK(antiadditive_cuts(Permutation{}).empty());
}

TEST_CASE("decompose_additive") {
  const auto d = decompose_additive(perm({2, 1, 4, 3}));
  REQUIRE(d.blocks.size() == 2);
  CHECK(d.blocks[0].perm == perm({2, 1}));
  CHECK(d.blocks[1].perm == perm({2, 1}));
  CHECK(d.cut_points == Cuts{2, 4});
  CHECK(d.reassemble() == perm({2, 1, 4, 3}));
  const auto irreducible = decompose_additive(perm({3, 1, 2}));
  REQUIRE(irreducible.blocks.size() == 1);
  CHECK(irreducible.blocks[0].perm == perm({3, 1, 2}));
  CHECK(decompose_additive(Permutation{}).blocks.empty());

  RngStream rng(21, 0);
  const auto w = sample_finite(1000, 0.5, rng);
  const auto big = decompose_additive(w);
  CHECK(block_sum(big) == cycle_counts(w));
  CHECK(big.reassemble() == w);
}

TEST_CASE("decompose_antiadditive") {
  const auto d = decompose_antiadditive(perm({4, 3, 2, 1}));
  REQUIRE(d.blocks.size() == 3);
  CHECK(d.blocks[0].kind == BlockKind::pair);
  CHECK(d.blocks[0].perm == perm({2, 1}));
  CHECK(d.blocks[1].perm == perm({2, 1}));
  CHECK(d.blocks[2].kind == BlockKind::central);
  CHECK(d.blocks[2].perm.empty());
  CHECK(d.reassemble() == perm({4, 3, 2, 1}));

  const auto c = decompose_antiadditive(Permutation::identity(3));
  REQUIRE(c.blocks.size() == 1);
  CHECK(c.blocks[0].kind == BlockKind::central);
  CHECK(c.blocks[0].perm == Permutation::identity(3));

  const auto odd = decompose_antiadditive(perm({5, 2, 3, 4, 1}));
  REQUIRE(odd.blocks.size() == 2);
  CHECK(odd.blocks[0].perm == perm({2, 1}));
  CHECK(odd.blocks[1].perm == perm({1, 2, 3}));
  CHECK(odd.reassemble() == perm({5, 2, 3, 4, 1}));

  RngStream rng(22, 0);
  const auto w = sample_finite(1001, 2.0, rng);
  const auto big = decompose_antiadditive(w);
  CHECK(big.reassemble() == w);
  CHECK(block_sum(big) == cycle_counts(w));
  const auto central = cycle_counts(big.blocks.back().perm);
  const auto all = cycle_counts(w);
  for (const auto& b : big.blocks) {
    if (b.kind != BlockKind::pair) continue;
    CHECK(only_even_cycles(b.perm));
    CHECK(is_pair_block(b.perm));
  }
  for (std::size_t len = 1; len <= all.max_length(); len += 2) CHECK(central.of(len) == all.of(len));
}

TEST_CASE("is_pair_block") {
  CHECK(is_pair_block(perm({2, 1})));
  CHECK(is_pair_block(perm({3, 4, 1, 2})));
  CHECK(is_pair_block(perm({4, 3, 2, 1})));
  CHECK_FALSE(is_pair_block(perm({1, 2})));
  CHECK_FALSE(is_pair_block(perm({1})));
  CHECK_FALSE(is_pair_block(Permutation{}));
  CHECK_FALSE(is_pair_block(perm({3, 1, 4, 2})));
}

TEST_CASE("reconstruction and additivity on random inputs of both signs") {
  RngStream rng(23, 0);
  for (int k = 0; k < 20000; ++k) {
    const double q = (k % 2 == 0) ? 0.3 + 0.6 * rng.uniform() : 1.1 + 4.0 * rng.uniform();
    const std::size_t n = rng() % 120;
    const auto w = sample_finite(n, q, rng);
    const auto add = decompose_additive(w);
    const auto anti = decompose_antiadditive(w);
    REQUIRE(add.reassemble() == w);
    REQUIRE(anti.reassemble() == w);
    REQUIRE(block_sum(add) == cycle_counts(w));
    REQUIRE(block_sum(anti) == cycle_counts(w));
    for (const auto& b : add.blocks) REQUIRE(additive_cuts(b.perm) == Cuts{b.length()});
    for (const auto& b : anti.blocks) {
      if (b.kind == BlockKind::pair) {
        REQUIRE(only_even_cycles(b.perm));
        REQUIRE(antiadditive_cuts(b.perm).back() == b.length() / 2);
      } else {
        REQUIRE(antiadditive_cuts(b.perm).empty());
      }
    }
  }
}

TEST_CASE("cut equivalence between prefixes and the driven chain") {
  RngStream rng(24, 0);
  for (int k = 0; k < 5000; ++k) {
    const double q = 0.2 + 0.7 * rng.uniform();
    const auto p = sample_process_prefix(q, 1 + rng() % 300, rng);
    const Cuts zeros = chain_zeros(p);
    // On the raw values the equivalence is exact.
    REQUIRE(additive_cuts(std::span<const std::uint32_t>(p.values)) == zeros);
    // After relabeling, cuts agree up to the last renewal; the trailing
    // segment can gain spurious cuts because relabeling forgets the gaps.
    Cuts relabeled = additive_cuts(relative_order(std::span<const std::uint32_t>(p.values)));
    const std::size_t last = zeros.empty() ? 0 : zeros.back();
    relabeled.erase(std::remove_if(relabeled.begin(), relabeled.end(), [&](std::size_t c) { return c > last; }),
                    relabeled.end());
    REQUIRE(relabeled == zeros);
  }
  // A one-step prefix that jumps to 3 has no renewal, yet its relative order does.
  ProcessPrefix p;
  p.values = {3};
  p.ranks = {3};
  CHECK(chain_zeros(p).empty());
  CHECK(additive_cuts(relative_order(std::span<const std::uint32_t>(p.values))) == Cuts{1});
}

TEST_CASE("decompose_prefix flags the trailing block") {
  ProcessPrefix p;
  p.values = {2, 1, 3, 6, 4};
  p.ranks = {2, 1, 1, 3, 1};
  const auto d = decompose_prefix(p);
  REQUIRE(d.blocks.size() == 3);
  CHECK(d.blocks[0].perm == perm({2, 1}));
  CHECK_FALSE(d.blocks[0].trailing);
  CHECK(d.blocks[1].perm == perm({1}));
  CHECK(d.blocks[2].trailing);
  CHECK(d.blocks[2].perm == perm({2, 1}));
  CHECK(d.source == perm({2, 1, 3, 5, 4}));
  CHECK(d.reassemble() == d.source);
}

TEST_CASE("excursions") {
  RngStream rng(25, 0);
  for (const auto& e : sample_excursions(1e-12, 100, rng)) {
    REQUIRE(e.length() == 1);
    REQUIRE(e.block == perm({1}));
  }
  CHECK_THROWS_AS(sample_excursions(1.0, 1, rng), BadParameter);
  CHECK_THROWS_AS(sample_excursions(0.99999, 1, rng, 50), ExcursionTooLong);

  SUBCASE("irreducible blocks, direct mean equals horizon over count") {
    const auto ex = sample_excursions(0.5, 100000, rng);
    RunningMoments t;
    std::uint64_t horizon = 0;
    for (const auto& e : ex) {
      REQUIRE(additive_cuts(e.block) == Cuts{e.length()});
      t.add(static_cast<double>(e.length()));
      horizon += e.length();
    }
    // Both estimators of E(T) from one run coincide algebraically; check the
    // mean against the renewal rate (q;q)_inf^{-1} instead.
    CHECK(static_cast<double>(horizon) / ex.size() == doctest::Approx(t.mean()));
    const double expected = 1.0 / stationary_mu(0.5).pmf[0];
    CHECK(testing::within_se(t.mean(), expected, t.standard_error()));
  }

  SUBCASE("P(T = 1) = 1 - q") {
    const auto lengths = excursion_lengths(0.5, 1'000'000, rng);
    const double p1 = static_cast<double>(std::count(lengths.begin(), lengths.end(), 1u)) / lengths.size();
    CHECK(std::abs(p1 - 0.5) < 0.005);
  }

  SUBCASE("excursion lengths equal chain return times in law") {
    RngStream a(26, 0), b(27, 0);
    std::vector<std::uint64_t> direct(12, 0), chain(12, 0);
    for (const auto& e : sample_excursions(0.6, 100000, a)) ++direct[std::min<std::size_t>(e.length(), 11)];
    for (auto t : excursion_lengths(0.6, 100000, b)) ++chain[std::min<std::size_t>(t, 11)];
    direct.erase(direct.begin());
    chain.erase(chain.begin());
    CHECK(chi_square_two_sample(direct, chain).p_value > 1e-3);
  }
}

TEST_CASE("pair chain return times") {
  RngStream rng(28, 0);
  for (auto t : pair_chain_return_times(1e-12, 100, rng)) REQUIRE(t == 1);
  CHECK_THROWS_AS(pair_chain_return_times(2.0, 1, rng), BadParameter);
  CHECK_THROWS_AS(pair_chain_return_times(0.5, 0, rng), BadParameter);
  CHECK_THROWS_AS(pair_chain_return_times(0.9999, 10, rng, 20), ReturnTooLong);

  const auto r = pair_chain_return_times(0.5, 400000, rng);
  RunningMoments m;
  std::size_t ones = 0;
  for (auto t : r) {
    m.add(static_cast<double>(t));
    ones += t == 1 ? 1 : 0;
  }
  CHECK(std::abs(static_cast<double>(ones) / r.size() - 0.25) < 0.005);
  const double mu0 = stationary_mu(0.5).pmf[0];
  CHECK(testing::within_se(m.mean() * mu0 * mu0, 1.0, m.standard_error() * mu0 * mu0));
}

TEST_CASE("occupation distribution") {
  RngStream rng(29, 0);
  const auto trivial = occupation_distribution(1e-12, 1000, 10, rng);
  CHECK(trivial.pmf().size() == 1);
  CHECK(trivial.pmf()[0] == doctest::Approx(1.0));
  const auto occ = occupation_distribution(0.5, 2'000'000, 1000, rng);
  CHECK(occ.steps == 2'000'000);
  const auto law = stationary_mu(0.5);
  CHECK(total_variation(occ.pmf(), law.pmf) < 0.01);
  CHECK_THROWS_AS(occupation_distribution(1.5, 10, 0, rng), BadParameter);
}

TEST_CASE("symmetric block harvesting") {
  RngStream rng(30, 0);
  CHECK_THROWS_AS(sample_symmetric_blocks(1.0, 10, 1, rng, [](const SymmetricBlock&, Parity) {}), BadParameter);
  CHECK_THROWS_AS(sample_symmetric_blocks(0.5, 10, 1, rng, [](const SymmetricBlock&, Parity) {}), BadParameter);

  SUBCASE("emitted pair blocks satisfy the pair invariants") {
    std::size_t pairs = 0, centrals = 0;
    sample_symmetric_blocks(2.0, 801, 300, rng, [&](const SymmetricBlock& b, Parity parity) {
      CHECK(parity == Parity::odd);
      if (b.kind == SymmetricKind::pair) {
        ++pairs;
        REQUIRE(b.length() % 2 == 0);
        REQUIRE(is_pair_block(b.block));
        REQUIRE(only_even_cycles(b.block));
      } else {
        ++centrals;
        REQUIRE(antiadditive_cuts(b.block).empty());
      }
    });
    CHECK(centrals == 300);
    CHECK(pairs > 1000);
  }

  SUBCASE("even central block is empty with positive probability") {
    const auto h = harvest_symmetric_blocks(2.0, 200, 2000, rng);
    CHECK(h.parity == Parity::even);
    const auto empty = std::count_if(h.centrals.begin(), h.centrals.end(), [](const Permutation& c) { return c.empty(); });
    CHECK(empty > 0);
    CHECK(empty < 2000);
  }

  SUBCASE("mean pair-block length does not depend on the ambient size") {
    std::array<RunningMoments, 2> m;
    for (std::size_t k : {0, 1}) {
      const std::size_t n = k == 0 ? 2001 : 4001;
      const std::size_t reps = k == 0 ? 1200 : 600;
      sample_symmetric_blocks(2.0, n, reps, rng, [&](const SymmetricBlock& b, Parity) {
        if (b.kind == SymmetricKind::pair) m[k].add(static_cast<double>(b.length()));
      });
    }
    CHECK(testing::within_se(m[0].mean(), m[1].mean(), std::hypot(m[0].standard_error(), m[1].standard_error())));
    // Twice the mean pair-chain return time at 1/q.
    const double mu0 = stationary_mu(0.5).pmf[0];
    const double target = 2.0 / (mu0 * mu0);
    CHECK(testing::within_se(m[0].mean(), target, m[0].standard_error()));
  }
}

TEST_CASE("covering block lengths") {
  RngStream rng(31, 0);
  for (auto t : covering_block_lengths(1e-12, 100, 50, rng)) REQUIRE(t == 1);
  RunningMoments cover, plain;
  for (auto t : covering_block_lengths(0.5, 2000, 20000, rng)) cover.add(static_cast<double>(t));
  for (auto t : excursion_lengths(0.5, 20000, rng)) plain.add(static_cast<double>(t));
  CHECK(cover.mean() >= plain.mean());
  for (auto t : covering_block_lengths(2.0, 500, 200, rng)) REQUIRE(t % 2 == 0);
  CHECK_THROWS_AS(covering_block_lengths(1.0, 10, 1, rng), BadParameter);
}
