#pragma once

#include "nlcp/eval.hpp"
#include "nlcp/noise_estimation.hpp"
#include "nlcp/robust.hpp"

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

namespace nlcp::cli {

/// Rounds to 6 significant digits so that dumped files are stable and short.
double round_sig6(double value);

nlohmann::json to_json(const CalibrationResult& result);
nlohmann::json to_json(const RobustCalibration& robust);
nlohmann::json to_json(const ComparisonReport& report);
nlohmann::json to_json(const SigmaEstimate& estimate);

/// Keys are sorted (nlohmann's default object type is an ordered std::map).
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// Table-style text summary of a comparison.
std::string to_markdown(const ComparisonReport& report);

} // namespace nlcp::cli
