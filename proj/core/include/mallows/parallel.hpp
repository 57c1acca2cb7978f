#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "mallows/rng.hpp"

namespace mallows {

/// How a Monte Carlo job is split. Work is cut into `chunks` fixed units;
/// chunk c always draws from RngStream(seed, c), so the merged result depends
/// on (seed, chunks) only. `workers` changes wall time, never the output.
struct MonteCarloPlan {
  std::uint64_t seed = 42;
  std::size_t chunks = 50;
  unsigned workers = 1;

  MonteCarloPlan with_seed(std::uint64_t s) const {
    MonteCarloPlan p = *this;
    p.seed = s;
    return p;
  }
};

/// Number of items chunk `c` handles when `total` items are spread over the plan.
inline std::size_t chunk_share(std::size_t total, std::size_t chunks, std::size_t c) {
  return total / chunks + (c < total % chunks ? 1 : 0);
}

/// Runs fn(chunk_index, item_count, rng) for every chunk and returns the
/// results in chunk order. The first exception (by chunk index) is rethrown.
template <typename Fn>
auto run_partitioned(const MonteCarloPlan& plan, std::size_t total, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t{}, std::size_t{}, std::declval<RngStream&>()))> {
  using Result = decltype(fn(std::size_t{}, std::size_t{}, std::declval<RngStream&>()));
  const std::size_t chunks = std::max<std::size_t>(1, plan.chunks);
  std::vector<Result> results(chunks);
  std::vector<std::exception_ptr> errors(chunks);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) {
      try {
        RngStream rng(plan.seed, c);
        results[c] = fn(c, chunk_share(total, chunks, c), rng);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };

  const unsigned n_workers =
      static_cast<unsigned>(std::clamp<std::size_t>(plan.workers, 1, chunks));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace mallows
