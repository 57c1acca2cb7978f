#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "mallows/permutation.hpp"
#include "mallows/rng.hpp"
#include "mallows/sampler.hpp"

namespace mallows {

inline constexpr std::uint64_t kDefaultStepCap = 10'000'000;

// Markov chains ----------------------------------------------------------------

/// M_{n+1} = max(M_n, z) - 1. A renewal of the process is exactly m = 0.
std::uint64_t chain_step(std::uint64_t m, std::uint64_t z) noexcept;

/// Two independent copies; a symmetric regeneration is exactly (0, 0).
struct PairState {
  std::uint64_t m = 0;
  std::uint64_t m_prime = 0;

  bool at_origin() const noexcept { return m == 0 && m_prime == 0; }
  friend bool operator==(const PairState&, const PairState&) = default;
};

PairState chain_step(PairState state, std::uint64_t z, std::uint64_t z_prime) noexcept;

/// Return time of the single chain to 0 starting from 0, i.e. one excursion size.
std::uint64_t single_return_time(double q, RngStream& rng, std::uint64_t cap = kDefaultStepCap);
std::vector<std::uint64_t> excursion_lengths(double q, std::size_t count, RngStream& rng,
                                             std::uint64_t cap = kDefaultStepCap);

/// Return time of the pair chain to (0, 0) starting from (0, 0).
std::uint64_t pair_return_time(double q, RngStream& rng, std::uint64_t cap = kDefaultStepCap);
std::vector<std::uint64_t> pair_chain_return_times(double q, std::size_t count, RngStream& rng,
                                                   std::uint64_t cap = kDefaultStepCap);

struct Occupation {
  std::vector<std::uint64_t> counts;  // counts[j] = visits to state j
  std::uint64_t steps = 0;

  std::vector<double> pmf() const;
};

/// Long-run occupation of the single chain started at 0, after `burn_in` steps.
Occupation occupation_distribution(double q, std::uint64_t steps, std::uint64_t burn_in,
                                   RngStream& rng);

// Blocks and decompositions ------------------------------------------------------

/// An irreducible block of the additive decomposition relabeled to {1..T}.
struct Excursion {
  Permutation block;
  std::size_t length() const noexcept { return block.size(); }
};

enum class SymmetricKind { central, pair };
enum class Parity { even, odd };

inline Parity parity_of(std::size_t n) noexcept { return n % 2 == 0 ? Parity::even : Parity::odd; }

struct SymmetricBlock {
  SymmetricKind kind = SymmetricKind::central;
  Permutation block;
  std::size_t length() const noexcept { return block.size(); }
};

/// True when `block` has size 2d, sends [1,d] onto [d+1,2d] and vice versa.
bool is_pair_block(const Permutation& block);

enum class BlockKind { excursion, pair, central };

struct Block {
  BlockKind kind = BlockKind::excursion;
  Permutation perm;
  bool trailing = false;  // incomplete final block of a process prefix

  std::size_t length() const noexcept { return perm.size(); }
};

enum class DecompositionKind { additive, antiadditive };

struct Decomposition {
  DecompositionKind kind = DecompositionKind::additive;
  Permutation source;
  std::vector<Block> blocks;
  std::vector<std::size_t> cut_points;

  /// Rebuilds the source permutation from the blocks alone.
  Permutation reassemble() const;
};

/// Every k in [1, n] with max(values[1..k]) = k. On a process prefix these are
/// exactly the renewal times.
std::vector<std::size_t> additive_cuts(std::span<const std::uint32_t> values);
inline std::vector<std::size_t> additive_cuts(const Permutation& w) {
  return additive_cuts(w.image());
}

/// Every k <= n/2 with w([1,k]) = [n-k+1, n] and w([n-k+1, n]) = [1, k].
std::vector<std::size_t> antiadditive_cuts(const Permutation& w);

Decomposition decompose_additive(const Permutation& w);

/// Pair blocks from the outside in, then one (possibly empty) central block.
Decomposition decompose_antiadditive(const Permutation& w);

/// Excursions of a process prefix; values after the last renewal form one
/// trailing block (flagged). The source is the relative order of the prefix.
Decomposition decompose_prefix(const ProcessPrefix& prefix);

// Samplers ---------------------------------------------------------------------

using ExcursionSink = std::function<void(const Excursion&)>;

/// Streams `count` i.i.d. excursions of the Mallows process (0 < q < 1).
/// Throws ExcursionTooLong when one exceeds `cap`.
void for_each_excursion(double q, std::size_t count, RngStream& rng, const ExcursionSink& sink,
                        std::uint64_t cap = kDefaultStepCap);
std::vector<Excursion> sample_excursions(double q, std::size_t count, RngStream& rng,
                                         std::uint64_t cap = kDefaultStepCap);

using SymmetricSink = std::function<void(const SymmetricBlock&, Parity)>;

/// For each of `reps` samples w ~ Mallows(n, q), q > 1: emits the interior
/// pair blocks and then the central block tagged with the parity of n.
/// Interior means every pair block after the outermost one whose outer edge
/// lies within distance n/4 of the boundary.
void sample_symmetric_blocks(double q, std::size_t n, std::size_t reps, RngStream& rng,
                             const SymmetricSink& sink);

struct SymmetricHarvest {
  std::vector<SymmetricBlock> pairs;
  std::vector<Permutation> centrals;
  Parity parity = Parity::odd;
};

SymmetricHarvest harvest_symmetric_blocks(double q, std::size_t n, std::size_t reps,
                                          RngStream& rng);

/// Length of the regenerative block covering position n: excursion sizes of
/// the single chain for q < 1, twice the pair-chain return intervals at
/// parameter 1/q for q > 1. Returns one sample per rep.
std::vector<std::uint64_t> covering_block_lengths(double q, std::uint64_t n, std::size_t reps,
                                                  RngStream& rng,
                                                  std::uint64_t cap = kDefaultStepCap);

}  // namespace mallows
