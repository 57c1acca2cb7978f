#pragma once

#include <nlohmann/json.hpp>

#include "mallows/constants.hpp"
#include "mallows/harness.hpp"
#include "mallows/permutation.hpp"
#include "mallows/regenerative.hpp"
#include "mallows/statistics.hpp"

namespace mallows {

// Key order is fixed so that identical reports serialize to identical bytes.
using Json = nlohmann::ordered_json;

Json to_json(const Permutation& w);
Json to_json(const CycleCounts& cc);
Json to_json(const Decomposition& d, bool include_blocks);
Json to_json(const EstimateReport& e);
Json to_json(const RatioEstimate& e);
Json to_json(const Estimate& e);
Json to_json(const QSeriesValue& v);
Json to_json(const StationaryLaw& law);
/// `include_workers` adds worker_count. Leave it out where reports must be
/// byte-identical across worker counts.
Json to_json(const ConstantsReport& r, bool include_workers);
Json to_json(const NormalityReport& r);
Json to_json(const CltReport& r);
Json to_json(const ScalingReport& r);
Json to_json(const ParityReport& r);
Json to_json(const SizeBiasReport& r);

const char* to_string(BlockKind kind) noexcept;
const char* to_string(Parity parity) noexcept;

}  // namespace mallows
