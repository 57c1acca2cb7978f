#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mallows/report.hpp"

namespace mallows {

enum class Profile { desk, deep };

/// Parses "desk" or "deep". Throws BadParameter otherwise.
Profile parse_profile(std::string_view text);
const char* to_string(Profile profile) noexcept;

inline constexpr int kCriterionCount = 11;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  bool cap_hit = false;  // a resource cap aborted the criterion
  Json details;
  double seconds = 0;  // wall time; never serialized
};

struct ValidationOptions {
  std::uint64_t seed = 42;
  unsigned workers = 1;
  std::size_t chunks = 50;
  Profile profile = Profile::desk;
  std::vector<int> only;  // empty = all criteria
  std::function<void(const CriterionResult&)> on_result;
};

struct ValidationReport {
  std::uint64_t seed = 0;
  std::size_t chunks = 0;
  Profile profile = Profile::desk;
  std::vector<CriterionResult> criteria;

  bool passed() const noexcept;
  bool cap_hit() const noexcept;
};

/// Name of criterion `id` (1-based).
std::string criterion_name(int id);

/// Runs one criterion. Resource caps are caught and reported as failures with
/// cap_hit set; other errors propagate.
CriterionResult run_criterion(int id, const ValidationOptions& options);

/// Runs the selected criteria in order. Criterion 11 reruns the selected
/// criteria 1..10 (all of them when none is selected) with a different worker
/// count and compares the serialized reports.
ValidationReport run_validation(const ValidationOptions& options);

/// Worker-count independent JSON: no timings, no worker count.
Json to_json(const ValidationReport& report);
Json to_json(const CriterionResult& result);

}  // namespace mallows
