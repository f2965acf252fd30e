#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "rsgarch/diagnostics.hpp"
#include "rsgarch/estimation.hpp"
#include "rsgarch/types.hpp"

namespace rsgarch {

/// Version stamped on every result document.
inline constexpr int kResultSchemaVersion = 1;

void to_json(nlohmann::json& j, const YearMonth& v);
void from_json(const nlohmann::json& j, YearMonth& v);
void to_json(nlohmann::json& j, const Cov2& v);
void to_json(nlohmann::json& j, const MeanParams& v);
void from_json(const nlohmann::json& j, MeanParams& v);
void to_json(nlohmann::json& j, const BekkParams& v);
void from_json(const nlohmann::json& j, BekkParams& v);
void to_json(nlohmann::json& j, const RsModelParams& v);
void from_json(const nlohmann::json& j, RsModelParams& v);
void to_json(nlohmann::json& j, const ExcessReturnSeries& v);
void to_json(nlohmann::json& j, const FilterOutput& v);
void from_json(const nlohmann::json& j, FilterOutput& v);

[[nodiscard]] Cov2 cov2_from_json(const nlohmann::json& j);
[[nodiscard]] ExcessReturnSeries series_from_json(const nlohmann::json& j);

/// Stable result document: schema_version, model, restricted, loglik, convergence metadata,
/// h0/eps0, and parameters / std_errors blocks (per-state blocks plus p, q for two regimes).
/// Pinned restricted coefficients are omitted; undefined standard errors are null.
[[nodiscard]] nlohmann::json result_to_json(const EstimationResult& r);
/// Throws InputError on a malformed or unsupported document.
[[nodiscard]] EstimationResult result_from_json(const nlohmann::json& j);

[[nodiscard]] EstimationResult load_result(const std::filesystem::path& path);
void save_result(const std::filesystem::path& path, const EstimationResult& r);

/// Reads a parameter document: either a result document or a bare "parameters" block.
[[nodiscard]] ModelParams params_from_json(const nlohmann::json& j);

}  // namespace rsgarch

namespace rsgarch::diagnostics {

void to_json(nlohmann::json& j, const SummaryStats& v);

}  // namespace rsgarch::diagnostics
