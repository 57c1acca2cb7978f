#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

#include "mallows/constants.hpp"
#include "mallows/errors.hpp"
#include "mallows/harness.hpp"
#include "mallows/parallel.hpp"
#include "mallows/permutation.hpp"
#include "mallows/regenerative.hpp"
#include "mallows/sampler.hpp"
#include "mallows/statistics.hpp"
#include "mallows/validation.hpp"

namespace mallows::cli {

namespace {

class Context {
 public:
  explicit Context(const RunConfig& c)
      : c_(c), profile_(parse_profile(c.profile)), plan_{c.seed, c.chunks, c.workers} {
    if (c.format != "json" && c.format != "csv") throw BadParameter("--format must be json or csv");
    if (c.chunks == 0) throw BadParameter("--chunks must be positive");
    if (c.workers == 0) throw BadParameter("--workers must be positive");
  }

  const RunConfig& config() const { return c_; }
  bool csv() const { return c_.format == "csv"; }
  const MonteCarloPlan& plan() const { return plan_; }
  Profile profile() const { return profile_; }

  double q() const {
    if (!c_.q) throw BadParameter("--q is required for " + c_.subcommand);
    if (!(*c_.q > 0) || !std::isfinite(*c_.q)) throw BadParameter("--q must be positive");
    return *c_.q;
  }
  std::size_t n(std::optional<std::size_t> fallback = std::nullopt) const {
    if (c_.n) return *c_.n;
    if (fallback) return *fallback;
    throw BadParameter("--n is required for " + c_.subcommand);
  }
  // Default replicate counts grow tenfold under the deep profile.
  std::size_t reps(std::size_t desk_default) const {
    return c_.reps.value_or(profile_ == Profile::deep ? 10 * desk_default : desk_default);
  }
  std::size_t target_samples(std::size_t desk_default) const {
    return c_.target_samples.value_or(profile_ == Profile::deep ? 10 * desk_default : desk_default);
  }
  std::size_t i_max(std::size_t fallback) const { return c_.i_max.value_or(fallback); }
  std::vector<std::size_t> sizes(std::vector<std::size_t> fallback) const {
    return c_.sizes.empty() ? fallback : c_.sizes;
  }
  double threshold(double fallback) const { return c_.threshold.value_or(fallback); }

  // Machine output always records the subcommand and the seed first.
  Json head() const { return Json{{"command", c_.subcommand}, {"seed", c_.seed}}; }

  CommandResult emit(Json body, std::string csv_text, int exit_code = kPass) const {
    CommandResult r;
    r.exit_code = exit_code;
    if (csv()) {
      r.files.push_back({c_.subcommand + ".csv", std::move(csv_text)});
    } else {
      Json j = head();
      for (auto& [k, v] : body.items()) {
        if (!j.contains(k)) j[k] = std::move(v);
      }
      r.files.push_back({c_.subcommand + ".json", j.dump(2) + "\n"});
    }
    return r;
  }

 private:
  const RunConfig& c_;
  Profile profile_;
  MonteCarloPlan plan_;
};

std::string num(double x) { return Json(x).dump(); }

std::vector<CycleStatistic> parse_stats(const std::vector<std::string>& names) {
  std::vector<CycleStatistic> out;
  for (const auto& s : names) out.push_back(CycleStatistic::parse(s));
  return out;
}

std::string quoted(const Permutation& w) { return "\"" + to_one_line(w) + "\""; }

Permutation parse_perm(const std::string& text) {
  std::vector<std::int64_t> values;
  std::string token;
  std::istringstream is(text);
  while (std::getline(is, token, ',')) {
    std::istringstream ts(token);
    std::int64_t v = 0;
    std::string trailing;
    if (!(ts >> v) || (ts >> trailing)) throw BadParameter("--perm: not an integer: '" + token + "'");
    values.push_back(v);
  }
  return make_permutation(values);
}

Json histogram(const std::map<std::uint64_t, std::uint64_t>& counts) {
  Json j = Json::object();
  for (const auto& [k, v] : counts) j[std::to_string(k)] = v;
  return j;
}

// sample ---------------------------------------------------------------------

CommandResult cmd_sample(const RunConfig& config) {
  const Context ctx(config);
  const double q = ctx.q();
  const std::size_t n = ctx.n();
  if (n == 0) throw BadParameter("--n must be at least 1");
  const std::size_t count = config.reps.value_or(10);
  auto parts = run_partitioned(ctx.plan(), count, [&](std::size_t, std::size_t share, RngStream& rng) {
    std::vector<Permutation> out;
    out.reserve(share);
    for (std::size_t k = 0; k < share; ++k) out.push_back(sample_finite(n, q, rng));
    return out;
  });

  Json samples = Json::array();
  std::ostringstream csv;
  for (std::size_t i = 1; i <= n; ++i) csv << (i > 1 ? "," : "") << 'w' << i;
  csv << '\n';
  for (const auto& part : parts) {
    for (const auto& w : part) {
      if (ctx.csv()) {
        csv << to_one_line(w) << '\n';
      } else {
        samples.push_back(to_json(w));
      }
    }
  }
  Json body{{"q", q}, {"n", n}, {"count", count}, {"chunks", config.chunks}, {"samples", samples}};
  return ctx.emit(std::move(body), csv.str());
}

// exact ----------------------------------------------------------------------

CommandResult cmd_exact(const RunConfig& config) {
  const Context ctx(config);
  const double q = ctx.q();
  const std::size_t n = ctx.n();
  const auto dist = exact_distribution(n, q);
  std::ostringstream csv;

  if (!config.stats.empty()) {
    const auto stats = parse_stats(config.stats);
    const auto values = exact_expectation(dist, [&](const Permutation& w) {
      const auto cc = cycle_counts(w);
      std::vector<double> v;
      for (const auto& s : stats) v.push_back(s(cc));
      return v;
    });
    Json expectations = Json::object();
    csv << "statistic,expectation\n";
    for (std::size_t i = 0; i < stats.size(); ++i) {
      expectations[stats[i].name()] = static_cast<double>(values[i]);
      csv << stats[i].name() << ',' << num(static_cast<double>(values[i])) << '\n';
    }
    Json body{{"n", n},
              {"q", q},
              {"total_probability", static_cast<double>(dist.total_probability())},
              {"expectations", expectations}};
    return ctx.emit(std::move(body), csv.str());
  }

  Json entries = Json::array();
  for (const auto& e : dist.entries) {
    entries.push_back(Json{{"perm", to_json(e.perm)},
                           {"inversions", e.inversions},
                           {"probability", static_cast<double>(e.probability)}});
  }
  write_csv(csv, dist);
  Json body{{"n", n},
            {"q", q},
            {"total_probability", static_cast<double>(dist.total_probability())},
            {"entries", entries}};
  return ctx.emit(std::move(body), csv.str());
}

// decompose ------------------------------------------------------------------

CommandResult cmd_decompose(const RunConfig& config) {
  const Context ctx(config);
  Permutation w;
  if (!config.perm.empty()) {
    w = parse_perm(config.perm);
  } else {
    RngStream rng(config.seed, 0);
    w = sample_finite(ctx.n(), ctx.q(), rng);
  }
  std::string kind = config.kind;
  if (kind.empty()) kind = config.q && *config.q > 1.0 ? "antiadditive" : "additive";
  Decomposition d;
  if (kind == "additive") {
    d = decompose_additive(w);
  } else if (kind == "antiadditive") {
    d = decompose_antiadditive(w);
  } else {
    throw BadParameter("--kind must be additive or antiadditive");
  }

  std::ostringstream csv;
  csv << "block,kind,length,cycles,perm\n";
  for (std::size_t i = 0; i < d.blocks.size(); ++i) {
    const auto& b = d.blocks[i];
    csv << i << ',' << to_string(b.kind) << ',' << b.length() << ',' << cycle_counts(b.perm).total() << ','
        << quoted(b.perm) << '\n';
  }
  Json body{{"q", config.q ? Json(*config.q) : Json(nullptr)},
            {"source", to_json(w)},
            {"decomposition", to_json(d, true)}};
  return ctx.emit(std::move(body), csv.str());
}

// excursions -----------------------------------------------------------------

struct ExcursionRow {
  std::uint64_t length = 0;
  std::uint64_t cycles = 0;
  std::vector<std::uint64_t> counts;
};

CommandResult cmd_excursions(const RunConfig& config) {
  const Context ctx(config);
  const double q = ctx.q();
  if (q >= 1.0) throw BadParameter("excursions need 0 < q < 1");
  const std::size_t count = ctx.reps(100'000);
  const std::size_t i_max = ctx.i_max(10);
  auto parts = run_partitioned(ctx.plan(), count, [&](std::size_t, std::size_t share, RngStream& rng) {
    std::vector<ExcursionRow> rows;
    if (share == 0) return rows;
    rows.reserve(share);
    for_each_excursion(q, share, rng, [&](const Excursion& e) {
      const auto cc = cycle_counts(e.block);
      ExcursionRow r{e.length(), cc.total(), {}};
      for (std::size_t i = 1; i <= i_max; ++i) r.counts.push_back(cc.of(i));
      rows.push_back(std::move(r));
    });
    return rows;
  });

  RunningMoments lengths;
  std::map<std::uint64_t, std::uint64_t> hist;
  std::ostringstream csv;
  csv << "index,length,cycles";
  for (std::size_t i = 1; i <= i_max; ++i) csv << ",C" << i;
  csv << '\n';
  std::size_t index = 0;
  for (const auto& part : parts) {
    for (const auto& r : part) {
      lengths.add(static_cast<double>(r.length));
      ++hist[r.length];
      if (ctx.csv()) {
        csv << index << ',' << r.length << ',' << r.cycles;
        for (auto c : r.counts) csv << ',' << c;
        csv << '\n';
      }
      ++index;
    }
  }
  Json body{{"q", q},
            {"count", count},
            {"chunks", config.chunks},
            {"mean_length", Json{{"value", lengths.mean()}, {"standard_error", lengths.standard_error()}}},
            {"inverse_mean_length", 1.0 / lengths.mean()},
            {"stationary_mu0", stationary_mu(q).pmf[0]},
            {"length_counts", histogram(hist)}};
  return ctx.emit(std::move(body), csv.str());
}

// symmetric-blocks -----------------------------------------------------------

CommandResult cmd_symmetric_blocks(const RunConfig& config) {
  const Context ctx(config);
  const double q = ctx.q();
  if (q <= 1.0) throw BadParameter("symmetric blocks need q > 1");
  const std::size_t n = ctx.n(kDefaultAmbientSize);
  const std::size_t reps = ctx.reps(1000);
  const std::size_t i_max = ctx.i_max(10);
  auto parts = run_partitioned(ctx.plan(), reps, [&](std::size_t, std::size_t share, RngStream& rng) {
    return share == 0 ? SymmetricHarvest{} : harvest_symmetric_blocks(q, n, share, rng);
  });

  const char* parity = to_string(parity_of(n));
  RunningMoments pair_lengths;
  std::map<std::uint64_t, std::uint64_t> central_lengths, central_fixed;
  std::size_t centrals = 0;
  std::ostringstream csv;
  csv << "kind,parity,length,cycles";
  for (std::size_t i = 1; i <= i_max; ++i) csv << ",C" << i;
  csv << '\n';
  auto row = [&](const char* kind, const Permutation& p) {
    if (!ctx.csv()) return;
    const auto cc = cycle_counts(p);
    csv << kind << ',' << parity << ',' << p.size() << ',' << cc.total();
    for (std::size_t i = 1; i <= i_max; ++i) csv << ',' << cc.of(i);
    csv << '\n';
  };
  for (const auto& h : parts) {
    for (const auto& b : h.pairs) {
      pair_lengths.add(static_cast<double>(b.length()));
      row("pair", b.block);
    }
    for (const auto& c : h.centrals) {
      ++centrals;
      ++central_lengths[c.size()];
      ++central_fixed[cycle_counts(c).of(1)];
      row("central", c);
    }
  }
  Json body{{"q", q},
            {"n", n},
            {"reps", reps},
            {"parity", parity},
            {"chunks", config.chunks},
            {"pair_blocks", pair_lengths.count()},
            {"pair_mean_length",
             Json{{"value", pair_lengths.mean()}, {"standard_error", pair_lengths.standard_error()}}},
            {"central_blocks", centrals},
            {"central_length_counts", histogram(central_lengths)},
            {"central_fixed_point_counts", histogram(central_fixed)}};
  return ctx.emit(std::move(body), csv.str());
}

// constants ------------------------------------------------------------------

CommandResult cmd_constants(const RunConfig& config) {
  const Context ctx(config);
  const double q = ctx.q();
  const std::size_t blocks = ctx.reps(100'000);
  const std::size_t i_max = ctx.i_max(10);
  const ConstantsReport r = q < 1.0 ? estimate_renewal_constants(q, blocks, i_max, ctx.plan())
                                    : estimate_symmetric_constants(q, blocks, i_max, ctx.plan(),
                                                                   ctx.n(kDefaultAmbientSize));
  std::ostringstream csv;
  csv << "quantity,cycle_length,cycle_length_2,value,standard_error\n";
  csv << "mu,,," << num(r.mu.value) << ',' << num(r.mu.standard_error) << '\n';
  for (std::size_t i = 0; i < r.alpha.size(); ++i) {
    csv << "alpha," << r.cycle_length(i + 1) << ",," << num(r.alpha[i].value) << ','
        << num(r.alpha[i].standard_error) << '\n';
  }
  for (std::size_t i = 0; i < r.beta.size(); ++i) {
    for (std::size_t j = 0; j < r.beta.size(); ++j) {
      csv << "beta," << r.cycle_length(i + 1) << ',' << r.cycle_length(j + 1) << ',' << num(r.beta[i][j])
          << ',' << num(r.beta_se[i][j]) << '\n';
    }
  }
  csv << "alpha_total,,," << num(r.alpha_total.value) << ',' << num(r.alpha_total.standard_error) << '\n';
  csv << "beta_total,,," << num(r.beta_total.value) << ',' << num(r.beta_total.standard_error) << '\n';
  return ctx.emit(to_json(r, true), csv.str());
}

// alpha1 ---------------------------------------------------------------------

CommandResult cmd_alpha1(const RunConfig& config) {
  const Context ctx(config);
  const double q = ctx.q();
  const auto v = alpha1(q, config.tol);
  std::ostringstream csv;
  csv << "q,value,truncation_bound,terms_used\n"
      << num(q) << ',' << num(v.value) << ',' << num(v.truncation_bound) << ',' << v.terms_used << '\n';
  Json body{{"q", q}, {"tol", config.tol}};
  const Json series = to_json(v);
  for (const auto& [k, x] : series.items()) body[k] = x;
  return ctx.emit(std::move(body), csv.str());
}

// mu-check -------------------------------------------------------------------

CommandResult cmd_mu_check(const RunConfig& config) {
  const Context ctx(config);
  const double q = ctx.q();
  if (q >= 1.0) throw BadParameter("mu-check needs 0 < q < 1");
  const std::uint64_t steps = ctx.reps(10'000'000);
  const std::uint64_t burn_in = 1000;
  const double threshold = ctx.threshold(0.005);
  auto parts = run_partitioned(ctx.plan(), steps, [&](std::size_t, std::size_t share, RngStream& rng) {
    return occupation_distribution(q, share, burn_in, rng);
  });
  Occupation occ;
  for (const auto& o : parts) {
    if (occ.counts.size() < o.counts.size()) occ.counts.resize(o.counts.size(), 0);
    for (std::size_t j = 0; j < o.counts.size(); ++j) occ.counts[j] += o.counts[j];
    occ.steps += o.steps;
  }
  const auto empirical = occ.pmf();
  const auto law = stationary_mu(q);
  const double tv = total_variation(empirical, law.pmf) + 0.5 * law.tail_bound;
  const bool passed = tv < threshold;

  Json states = Json::array();
  std::ostringstream csv;
  csv << "j,empirical,formula\n";
  const std::size_t rows = std::max(empirical.size(), law.pmf.size());
  for (std::size_t j = 0; j < rows; ++j) {
    const double e = j < empirical.size() ? empirical[j] : 0.0;
    const double f = j < law.pmf.size() ? law.pmf[j] : 0.0;
    states.push_back(Json{{"j", j}, {"empirical", e}, {"formula", f}});
    csv << j << ',' << num(e) << ',' << num(f) << '\n';
  }
  Json body{{"q", q},
            {"steps", steps},
            {"burn_in_per_chunk", burn_in},
            {"chunks", config.chunks},
            {"total_variation", tv},
            {"tail_bound", law.tail_bound},
            {"threshold", threshold},
            {"passed", passed},
            {"states", states}};
  return ctx.emit(std::move(body), csv.str(), passed ? kPass : kCheckFailed);
}

// clt ------------------------------------------------------------------------

CommandResult cmd_clt(const RunConfig& config) {
  const Context ctx(config);
  const double q = ctx.q();
  std::vector<std::string> names = config.stats;
  if (names.empty()) names = q < 1.0 ? std::vector<std::string>{"C", "C1", "C2"} : std::vector<std::string>{"C", "C2"};
  const auto stats = parse_stats(names);
  const auto r = clt_check(q, ctx.n(10'000), ctx.reps(10'000), stats, ctx.plan());
  std::ostringstream csv;
  csv << "statistic,n,reps,mean,variance,skewness,excess_kurtosis,ks_distance,passed\n";
  for (const auto& m : r.marginals) {
    csv << m.statistic << ',' << m.n << ',' << m.reps << ',' << num(m.mean) << ',' << num(m.variance) << ','
        << num(m.skewness) << ',' << num(m.excess_kurtosis) << ',' << num(m.ks_distance) << ','
        << (m.passed() ? "true" : "false") << '\n';
  }
  return ctx.emit(to_json(r), csv.str(), r.passed() ? kPass : kCheckFailed);
}

// scaling --------------------------------------------------------------------

CommandResult cmd_scaling(const RunConfig& config) {
  const Context ctx(config);
  const double q = ctx.q();
  if (config.stats.size() > 1) throw BadParameter("scaling takes a single --stat");
  const auto stat = CycleStatistic::parse(config.stats.empty() ? (q < 1.0 ? "C1" : "C2") : config.stats[0]);
  // Odd cycle counts stay bounded for q > 1, so compare raw moments there.
  const bool per_size = !(q > 1.0 && !stat.is_total() && stat.is_odd_cycle_count());
  const auto sizes = ctx.sizes({2500, 5000, 10000});
  const auto r = mean_variance_scaling(q, sizes, ctx.reps(2000), stat, ctx.plan(), per_size);
  std::ostringstream csv;
  csv << "n,reps,mean,mean_se,variance,variance_se,scaled_mean,scaled_mean_se,scaled_variance,scaled_variance_se\n";
  for (const auto& row : r.rows) {
    csv << row.n << ',' << row.reps << ',' << num(row.mean) << ',' << num(row.mean_se) << ','
        << num(row.variance) << ',' << num(row.variance_se) << ',' << num(r.scaled_mean(row)) << ','
        << num(r.scaled_mean_se(row)) << ',' << num(r.scaled_variance(row)) << ','
        << num(r.scaled_variance_se(row)) << '\n';
  }
  const bool passed = r.mean_stable && r.variance_stable;
  return ctx.emit(to_json(r), csv.str(), passed ? kPass : kCheckFailed);
}

// parity ---------------------------------------------------------------------

CommandResult cmd_parity(const RunConfig& config) {
  const Context ctx(config);
  const double q = ctx.q();
  const auto [same, other] =
      parity_limit_check(q, ctx.n(1000), ctx.reps(100'000), ctx.i_max(2), ctx.plan(), ctx.threshold(0.02));
  std::ostringstream csv;
  csv << "comparison,n,n_other,cycle_length,count,pmf,pmf_other\n";
  for (const auto* r : {&same, &other}) {
    for (std::size_t i = 0; i < r->pmf.size(); ++i) {
      const std::size_t cells = std::max(r->pmf[i].size(), r->pmf_other[i].size());
      for (std::size_t k = 0; k < cells; ++k) {
        csv << (r->same_parity ? "same" : "opposite") << ',' << r->n << ',' << r->n_other << ',' << 2 * i + 1
            << ',' << k << ',' << num(k < r->pmf[i].size() ? r->pmf[i][k] : 0.0) << ','
            << num(k < r->pmf_other[i].size() ? r->pmf_other[i][k] : 0.0) << '\n';
      }
    }
  }
  Json body{{"same_parity", to_json(same)}, {"opposite_parity", to_json(other)}};
  const bool passed = same.passed.value_or(false);
  return ctx.emit(std::move(body), csv.str(), passed ? kPass : kCheckFailed);
}

// size-bias ------------------------------------------------------------------

CommandResult cmd_size_bias(const RunConfig& config) {
  const Context ctx(config);
  const double q = ctx.q();
  const auto sizes = ctx.sizes({1000, 10000});
  const std::vector<std::uint64_t> ns(sizes.begin(), sizes.end());
  const auto r = size_bias_convergence(q, ns, ctx.reps(20'000), ctx.target_samples(1'000'000), ctx.plan());
  std::ostringstream csv;
  csv << "n,mean,standard_error,target,target_se,gap,gap_se\n";
  for (const auto& row : r.rows) {
    csv << row.n << ',' << num(row.covering.mean) << ',' << num(row.covering.standard_error) << ','
        << num(r.target.value) << ',' << num(r.target.standard_error) << ',' << num(row.gap) << ','
        << num(row.gap_se) << '\n';
  }
  return ctx.emit(to_json(r), csv.str(), r.final_gap_ok ? kPass : kCheckFailed);
}

// validate -------------------------------------------------------------------

CommandResult cmd_validate(const RunConfig& config) {
  const Context ctx(config);
  ValidationOptions opts;
  opts.seed = config.seed;
  opts.workers = config.workers;
  opts.chunks = config.chunks;
  opts.profile = ctx.profile();
  opts.only = config.only;
  opts.on_result = [](const CriterionResult& r) {
    std::cerr << (r.passed ? "PASS" : "FAIL") << "  criterion " << r.id << "  " << r.name
              << (r.cap_hit ? "  (resource cap hit)" : "") << '\n';
  };
  const auto report = run_validation(opts);
  std::ostringstream csv;
  csv << "id,name,passed,resource_cap_hit\n";
  for (const auto& r : report.criteria) {
    csv << r.id << ",\"" << r.name << "\"," << (r.passed ? "true" : "false") << ','
        << (r.cap_hit ? "true" : "false") << '\n';
  }
  const int code = report.cap_hit() ? kResourceCap : report.passed() ? kPass : kCheckFailed;
  return ctx.emit(to_json(report), csv.str(), code);
}

}  // namespace

const std::vector<CommandInfo>& commands() {
  static const std::vector<CommandInfo> list = {
      {"sample", "Dump --reps (default 10) exact samples of Mallows(--n, --q)", cmd_sample},
      {"exact", "Exact law on S_n by enumeration (n <= 9); with --stat, exact expectations", cmd_exact},
      {"decompose", "Cut points and blocks of --perm, or of a sample of Mallows(--n, --q)", cmd_decompose},
      {"excursions", "I.i.d. irreducible blocks of the Mallows process (0 < q < 1)", cmd_excursions},
      {"symmetric-blocks", "Interior pair blocks and central blocks harvested at --n (q > 1)",
       cmd_symmetric_blocks},
      {"constants", "Renewal (q < 1) or symmetric (q > 1) limit constants with standard errors",
       cmd_constants},
      {"alpha1", "Series value of alpha_1(q) with its truncation bound", cmd_alpha1},
      {"mu-check", "Chain occupation against the stationary law (0 < q < 1)", cmd_mu_check},
      {"clt", "Shape checks and covariance/n for cycle statistics at --n", cmd_clt},
      {"scaling", "Mean and variance of one statistic across --sizes", cmd_scaling},
      {"parity", "Odd-cycle pmfs at n against n + 2 and n + 1 (q > 1)", cmd_parity},
      {"size-bias", "Covering block length against E(T^2)/E(T)", cmd_size_bias},
      {"validate", "Run the acceptance battery", cmd_validate},
  };
  return list;
}

}  // namespace mallows::cli
