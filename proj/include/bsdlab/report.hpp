#pragma once

#include "bsdlab/rigidity.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace bsd {

// config: {"catalog": id} or {"map": {...}} or {"map_file": path}, optional "samples", "grid"
struct ReportConfig {
    std::string label;
    PolyMatrixMap map;
    std::vector<int> expected_index;  // empty when unknown
    int samples = 4;
    int grid = 200;
};
// InputError, message prefixed with "config:"
ReportConfig parse_report_config(const nlohmann::json& j, const std::filesystem::path& base = {});

struct ReportOutcome {
    nlohmann::json report;
    bool pass = false;
};

// index_sequence -> f_flat_classify -> respects_check -> detect_standard -> decompose
ReportOutcome run_pipeline(const ReportConfig& cfg, std::uint64_t seed);
// writes report.json, report.csv, summary.txt into `out`
ReportOutcome run_report(const nlohmann::json& config, const std::filesystem::path& out, std::uint64_t seed,
                         const std::filesystem::path& base = {});

// f# at one level: jet route against the oracle, flat classification and inclusions
nlohmann::json modulimap_run(const PolyMatrixMap& f, Level r, int samples, std::uint64_t seed);

std::string summary_text(const nlohmann::json& report);
std::string report_csv(const nlohmann::json& report);
// temp file + rename
void write_atomic(const std::filesystem::path& path, const std::string& contents);

nlohmann::json to_json(const IndexSequence& s);
nlohmann::json to_json(const RespectsReport& r);
nlohmann::json to_json(const RankGapReport& r);

}  // namespace bsd
