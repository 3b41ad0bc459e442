#pragma once

#include "chainlab/harness.hpp"

#include <filesystem>
#include <string>

#include "json.hpp"

namespace chainlab {

// shortest decimal that round-trips; "nan"/"inf" spelled out
std::string format_double(double v);

nlohmann::ordered_json report_json(const ConvergenceReport& report, const nlohmann::ordered_json& config);

// writes report.json, metrics.csv, profiles.csv (and rates.csv for bound sweeps) under dir.
// Wall time goes to timing.json so the other files are byte-stable for a fixed config and seed.
void emit_report(const ConvergenceReport& report, const std::filesystem::path& dir,
                 const nlohmann::ordered_json& config = nlohmann::ordered_json::object());

void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace chainlab
