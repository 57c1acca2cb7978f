#include <chrono>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "mallows/errors.hpp"
#include "output.hpp"
#include "run_config.hpp"

#ifndef MALLOWS_LAB_VERSION
#define MALLOWS_LAB_VERSION "0.0.0"
#endif

namespace {

using namespace mallows::cli;

constexpr const char* kFooter = R"(Settings may come from --config FILE. The file is either a JSON object
({"q": 0.5, "sizes": [1000, 2000]}) or key = value lines (q = 0.5,
sizes = [1000, 2000], '#' starts a comment). Keys are the long flag names
without dashes. Unknown keys are rejected. Flags given on the command line
override the file.

Options may appear before or after the subcommand.

Machine output (JSON or CSV) goes to standard output, or with --out DIR to
DIR/<subcommand>.<format> followed by DIR/manifest.json (config echo,
version, wall time, SHA-256 of every output). Diagnostics go to standard
error. Outputs are byte-identical for identical settings, whatever the
worker count; only the manifest carries timestamps.

Exit codes: 0 all checks passed, 1 a check failed, 2 usage or configuration
error, 3 a resource cap was hit.)";

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Mallows permutation cycle statistics laboratory", "mallows-lab"};
  app.footer(kFooter);
  app.set_version_flag("--version", MALLOWS_LAB_VERSION);
  app.config_formatter(std::make_shared<FlexibleConfig>());
  app.set_config("--config", "", "Read settings from FILE (JSON object or key = value lines)")
      ->check(CLI::ExistingFile);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.require_subcommand(1, 1);

  app.add_option("--q", cfg.q, "Mallows parameter, q > 0");
  app.add_option("--n", cfg.n, "Permutation size (ambient size for q > 1 harvests)");
  app.add_option("--sizes", cfg.sizes, "Comma-separated list of sizes")->delimiter(',');
  app.add_option("--reps", cfg.reps, "Replicates, samples, blocks or chain steps, depending on the subcommand");
  app.add_option("--target-samples", cfg.target_samples, "Samples for the E(T^2)/E(T) target (size-bias)");
  app.add_option("--imax", cfg.i_max, "Number of cycle-length indices to track");
  app.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  app.add_option("--workers", cfg.workers, "Worker threads; never changes the output")->capture_default_str();
  app.add_option("--chunks", cfg.chunks, "Fixed number of work units the job is cut into")->capture_default_str();
  app.add_option("--out", cfg.out, "Output directory");
  app.add_option("--format", cfg.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_option("--profile", cfg.profile, "desk, or deep for 10x default replicates")
      ->check(CLI::IsMember({"desk", "deep"}))
      ->capture_default_str();
  app.add_option("--stat,--stats", cfg.stats, "Cycle statistics: C or C<i>, comma-separated")->delimiter(',');
  app.add_option("--perm", cfg.perm, "Permutation in one-line notation, e.g. 2,1,3");
  app.add_option("--kind", cfg.kind, "additive or antiadditive (decompose)");
  app.add_option("--tol", cfg.tol, "Series tolerance (alpha1)")->capture_default_str();
  app.add_option("--threshold", cfg.threshold, "TV threshold override (mu-check, parity)");
  app.add_option("--only", cfg.only, "Criteria to run, comma-separated (validate)")->delimiter(',');

  for (const auto& c : commands()) app.add_subcommand(c.name, c.description);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsageError;
  }

  const auto* sub = app.get_subcommands().front();
  cfg.subcommand = sub->get_name();
  if (const auto* opt = app.get_config_ptr(); opt && opt->count() > 0) cfg.config_file = opt->as<std::string>();

  const auto& list = commands();
  const auto it = std::find_if(list.begin(), list.end(), [&](const CommandInfo& c) { return c.name == cfg.subcommand; });

  const auto started = std::chrono::steady_clock::now();
  const std::string started_at = utc_now();
  CommandResult result;
  try {
    result = it->run(cfg);
  } catch (const mallows::ResourceCapExceeded& e) {
    std::cerr << "mallows-lab: resource cap hit: " << e.what() << '\n';
    return kResourceCap;
  } catch (const mallows::TooLarge& e) {
    std::cerr << "mallows-lab: resource cap hit: " << e.what() << '\n';
    return kResourceCap;
  } catch (const mallows::Error& e) {
    std::cerr << "mallows-lab: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "mallows-lab: error: " << e.what() << '\n';
    return kUsageError;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  if (cfg.out.empty()) {
    if (!result.files.empty()) std::cout << result.files.front().content << std::flush;
  } else {
    try {
      write_outputs(cfg.out, result.files, ManifestInfo{echo(cfg), MALLOWS_LAB_VERSION, started_at, wall, result.exit_code});
    } catch (const std::exception& e) {
      std::cerr << "mallows-lab: cannot write outputs: " << e.what() << '\n';
      return kUsageError;
    }
  }
  if (result.exit_code == kCheckFailed) std::cerr << "mallows-lab: " << cfg.subcommand << ": check failed\n";
  return result.exit_code;
}
