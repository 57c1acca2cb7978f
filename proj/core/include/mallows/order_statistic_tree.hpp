#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace mallows {

// Fenwick tree over the indicator of still-available values {1..n}.
// select(k) returns the k-th smallest available value by binary descent.
class OrderStatisticTree {
 public:
  explicit OrderStatisticTree(std::size_t n) : tree_(n + 1), size_(n), available_(n) {
    // All-ones initial state: node i covers (i - lowbit(i), i].
    for (std::size_t i = 1; i <= n; ++i) tree_[i] = static_cast<std::uint32_t>(i & (~i + 1));
    top_ = n == 0 ? 0 : std::bit_floor(n);
  }

  std::size_t available() const noexcept { return available_; }

  // Precondition: 1 <= k <= available().
  std::size_t select(std::size_t k) const noexcept {
    std::size_t pos = 0;
    for (std::size_t step = top_; step > 0; step >>= 1) {
      const std::size_t next = pos + step;
      if (next <= size_ && tree_[next] < k) {
        pos = next;
        k -= tree_[next];
      }
    }
    return pos + 1;
  }

  // Precondition: value is currently available.
  void remove(std::size_t value) noexcept {
    for (std::size_t i = value; i <= size_; i += i & (~i + 1)) --tree_[i];
    --available_;
  }

 private:
  std::vector<std::uint32_t> tree_;
  std::size_t size_;
  std::size_t available_;
  std::size_t top_ = 0;
};

}  // namespace mallows
