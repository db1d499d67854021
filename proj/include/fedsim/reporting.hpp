#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fedsim/orchestration.hpp"

namespace fedsim {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "fedsim 0.1.0";

nlohmann::json round_log_to_json(const RoundLog& log);

// One JSON object per line.
void write_round_logs_jsonl(const std::string& path,
                            const std::vector<RoundLog>& logs);

// Learning curve, one row per round, metric columns averaged across trials.
// Absent metrics leave empty cells.
void write_curve_csv(const std::string& path,
                     const std::vector<std::vector<RoundLog>>& trials);

struct RunManifest {
    std::string created_utc;
    nlohmann::json config;
    int trials = 1;
    std::vector<std::string> log_files;
    std::string curve_file;
};

nlohmann::json manifest_to_json(const RunManifest& m);
void write_manifest(const std::string& path, const RunManifest& m);

}  // namespace fedsim
