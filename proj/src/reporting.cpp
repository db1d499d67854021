#include "fedsim/reporting.hpp"

#include <cstdio>
#include <fstream>

#include "fedsim/errors.hpp"

namespace fedsim {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

nlohmann::json round_log_to_json(const RoundLog& log) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["round"] = log.round;
    j["sampled_clients"] = log.sampled_clients;
    j["dropped_clients"] = log.dropped_clients;
    j["mean_client_loss"] =
        log.mean_client_loss ? nlohmann::json(*log.mean_client_loss)
                             : nlohmann::json(nullptr);
    j["test_accuracy"] = log.test_accuracy ? nlohmann::json(*log.test_accuracy)
                                           : nlohmann::json(nullptr);
    j["test_auroc"] = log.test_auroc ? nlohmann::json(*log.test_auroc)
                                     : nlohmann::json(nullptr);
    j["wall_ms"] = log.wall_ms;
    return j;
}

void write_round_logs_jsonl(const std::string& path,
                            const std::vector<RoundLog>& logs) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& log : logs) out << round_log_to_json(log).dump() << "\n";
    if (!out) throw IoError("write failed: " + path);
}

void write_curve_csv(const std::string& path,
                     const std::vector<std::vector<RoundLog>>& trials) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "round,mean_client_loss,test_accuracy,test_auroc\n";
    std::size_t rounds = 0;
    for (const auto& t : trials) rounds = std::max(rounds, t.size());
    for (std::size_t r = 0; r < rounds; ++r) {
        double loss = 0.0, acc = 0.0, auc = 0.0;
        int n_loss = 0, n_acc = 0, n_auc = 0;
        int round_no = 0;
        for (const auto& t : trials) {
            if (r >= t.size()) continue;
            round_no = t[r].round;
            if (t[r].mean_client_loss) { loss += *t[r].mean_client_loss; ++n_loss; }
            if (t[r].test_accuracy) { acc += *t[r].test_accuracy; ++n_acc; }
            if (t[r].test_auroc) { auc += *t[r].test_auroc; ++n_auc; }
        }
        out << round_no << ',';
        if (n_loss) out << fmt_double(loss / n_loss);
        out << ',';
        if (n_acc) out << fmt_double(acc / n_acc);
        out << ',';
        if (n_auc) out << fmt_double(auc / n_auc);
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

nlohmann::json manifest_to_json(const RunManifest& m) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["code_version"] = kCodeVersion;
    j["created_utc"] = m.created_utc;
    j["trials"] = m.trials;
    j["config"] = m.config;
    j["artifacts"] = {{"logs", m.log_files}, {"curve", m.curve_file}};
    return j;
}

void write_manifest(const std::string& path, const RunManifest& m) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << manifest_to_json(m).dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace fedsim
