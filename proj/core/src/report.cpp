#include "mallows/report.hpp"

namespace mallows {

const char* to_string(BlockKind kind) noexcept {
  switch (kind) {
    case BlockKind::excursion: return "excursion";
    case BlockKind::pair: return "pair";
    case BlockKind::central: return "central";
  }
  return "unknown";
}

const char* to_string(Parity parity) noexcept {
  return parity == Parity::even ? "even" : "odd";
}

Json to_json(const Permutation& w) {
  Json a = Json::array();
  for (auto v : w.image()) a.push_back(v);
  return a;
}

Json to_json(const CycleCounts& cc) {
  Json by_length = Json::object();
  for (std::size_t len = 1; len <= cc.max_length(); ++len) {
    if (cc.of(len)) by_length[std::to_string(len)] = cc.of(len);
  }
  return Json{{"counts", by_length}, {"total", cc.total()}};
}

Json to_json(const Decomposition& d, bool include_blocks) {
  Json j;
  j["kind"] = d.kind == DecompositionKind::additive ? "additive" : "antiadditive";
  j["n"] = d.source.size();
  j["cut_points"] = d.cut_points;
  Json blocks = Json::array();
  for (const auto& b : d.blocks) {
    Json jb;
    jb["kind"] = to_string(b.kind);
    jb["length"] = b.length();
    jb["trailing"] = b.trailing;
    jb["cycle_counts"] = to_json(cycle_counts(b.perm));
    if (include_blocks) jb["block"] = to_json(b.perm);
    blocks.push_back(std::move(jb));
  }
  j["blocks"] = std::move(blocks);
  if (include_blocks) j["source"] = to_json(d.source);
  return j;
}

Json to_json(const EstimateReport& e) {
  return Json{{"name", e.name},         {"mean", e.mean},   {"variance", e.variance},
              {"standard_error", e.standard_error}, {"count", e.count}, {"seed", e.seed},
              {"chunks", e.chunks}};
}

Json to_json(const RatioEstimate& e) {
  return Json{{"value", e.value}, {"standard_error", e.standard_error}};
}

Json to_json(const Estimate& e) {
  return Json{{"value", e.value}, {"standard_error", e.standard_error}};
}

Json to_json(const QSeriesValue& v) {
  return Json{{"value", v.value}, {"terms_used", v.terms_used}, {"truncation_bound", v.truncation_bound}};
}

Json to_json(const StationaryLaw& law) {
  return Json{{"normalizer", law.normalizer}, {"tail_bound", law.tail_bound}, {"pmf", law.pmf}};
}

Json to_json(const ConstantsReport& r, bool include_workers) {
  Json j;
  j["route"] = r.route == ConstantsRoute::renewal ? "renewal" : "symmetric";
  j["q"] = r.q;
  j["mu"] = r.mu.value;
  Json lengths = Json::array();
  Json alpha = Json::array();
  Json alpha_se = Json::array();
  for (std::size_t i = 0; i < r.alpha.size(); ++i) {
    lengths.push_back(r.cycle_length(i + 1));
    alpha.push_back(r.alpha[i].value);
    alpha_se.push_back(r.alpha[i].standard_error);
  }
  j["cycle_lengths"] = lengths;
  j["alpha"] = alpha;
  j["beta"] = r.beta;
  j["alpha_total"] = r.alpha_total.value;
  j["beta_total"] = r.beta_total.value;
  j["alpha_tail_points"] = r.alpha_tail_points.value;
  j["standard_errors"] = Json{{"mu", r.mu.standard_error},
                              {"alpha", alpha_se},
                              {"beta", r.beta_se},
                              {"alpha_total", r.alpha_total.standard_error},
                              {"beta_total", r.beta_total.standard_error},
                              {"alpha_tail_points", r.alpha_tail_points.standard_error}};
  j["sample_count"] = r.sample_count;
  j["seed"] = r.seed;
  j["chunks"] = r.chunks;
  if (include_workers) j["worker_count"] = r.workers;
  return j;
}

Json to_json(const NormalityReport& r) {
  return Json{{"statistic", r.statistic},
              {"n", r.n},
              {"reps", r.reps},
              {"mean", r.mean},
              {"variance", r.variance},
              {"skewness", r.skewness},
              {"excess_kurtosis", r.excess_kurtosis},
              {"ks_distance", r.ks_distance},
              {"lattice_continuity_correction", r.lattice},
              {"thresholds",
               Json{{"max_abs_skewness", r.thresholds.max_abs_skewness},
                    {"max_abs_excess_kurtosis", r.thresholds.max_abs_excess_kurtosis},
                    {"max_ks_distance", r.thresholds.max_ks_distance},
                    {"min_reps", r.thresholds.min_reps}}},
              {"pass", Json{{"skewness", r.skewness_ok},
                            {"kurtosis", r.kurtosis_ok},
                            {"ks", r.ks_ok},
                            {"all", r.passed()}}}};
}

Json to_json(const CltReport& r) {
  Json marginals = Json::array();
  for (const auto& m : r.marginals) marginals.push_back(to_json(m));
  return Json{{"q", r.q},
              {"n", r.n},
              {"reps", r.reps},
              {"marginals", marginals},
              {"covariance_over_n", r.covariance_over_n},
              {"covariance_over_n_se", r.covariance_over_n_se},
              {"seed", r.seed},
              {"chunks", r.chunks},
              {"passed", r.passed()}};
}

Json to_json(const ScalingReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back(Json{{"n", row.n},
                        {"reps", row.reps},
                        {"mean", row.mean},
                        {"mean_se", row.mean_se},
                        {"variance", row.variance},
                        {"variance_se", row.variance_se},
                        {"scaled_mean", r.scaled_mean(row)},
                        {"scaled_mean_se", r.scaled_mean_se(row)},
                        {"scaled_variance", r.scaled_variance(row)},
                        {"scaled_variance_se", r.scaled_variance_se(row)}});
  }
  return Json{{"q", r.q},
              {"statistic", r.statistic},
              {"divided_by_n", r.per_size},
              {"rows", rows},
              {"mean_stable", r.mean_stable},
              {"variance_stable", r.variance_stable},
              {"seed", r.seed},
              {"chunks", r.chunks}};
}

Json to_json(const ParityReport& r) {
  Json per_length = Json::array();
  for (std::size_t i = 0; i < r.total_variation.size(); ++i) {
    per_length.push_back(Json{{"cycle_length", 2 * i + 1},
                              {"pmf", r.pmf[i]},
                              {"pmf_other", r.pmf_other[i]},
                              {"total_variation", r.total_variation[i]}});
  }
  Json j{{"q", r.q},
         {"n", r.n},
         {"n_other", r.n_other},
         {"reps", r.reps},
         {"i_max", r.i_max},
         {"pooled_at", r.pool_at},
         {"same_parity", r.same_parity},
         {"odd_cycles", per_length},
         {"joint_total_variation", r.joint_total_variation}};
  if (r.passed) {
    j["threshold"] = r.threshold;
    j["passed"] = *r.passed;
  } else {
    j["threshold"] = nullptr;
    j["passed"] = nullptr;
  }
  return j;
}

Json to_json(const SizeBiasReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back(Json{{"n", row.n}, {"covering", to_json(row.covering)}, {"gap", row.gap},
                        {"gap_se", row.gap_se}});
  }
  return Json{{"q", r.q}, {"size_biased_mean", to_json(r.target)}, {"rows", rows},
              {"final_gap_within_3se", r.final_gap_ok}};
}

}  // namespace mallows
