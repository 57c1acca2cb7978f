#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mallows/report.hpp"

namespace mallows::cli {

// Everything a subcommand may read. Unset optionals fall back to
// per-subcommand defaults, scaled by the profile.
struct RunConfig {
  std::string subcommand;
  std::optional<double> q;
  std::optional<std::size_t> n;
  std::vector<std::size_t> sizes;
  std::optional<std::size_t> reps;
  std::optional<std::size_t> target_samples;
  std::optional<std::size_t> i_max;
  std::uint64_t seed = 42;
  unsigned workers = 1;
  std::size_t chunks = 50;
  std::string out;
  std::string format = "json";
  std::string profile = "desk";
  std::vector<std::string> stats;
  std::string perm;
  std::string kind;
  double tol = 1e-14;
  std::optional<double> threshold;
  std::vector<int> only;
  std::string config_file;
};

Json echo(const RunConfig& config);

// Accepts either a JSON object of flat keys or `key = value` lines (the
// INI/TOML subset understood by CLI11). Arrays map to repeated values.
class FlexibleConfig : public CLI::ConfigBase {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

}  // namespace mallows::cli
