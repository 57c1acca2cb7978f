#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include "mallows/permutation.hpp"

namespace testing {

inline mallows::Permutation perm(std::initializer_list<std::uint32_t> values) {
  return mallows::Permutation(std::vector<std::uint32_t>(values));
}

inline bool within_se(double a, double b, double se, double k = 3.0) {
  return std::abs(a - b) <= k * se;
}

}  // namespace testing
