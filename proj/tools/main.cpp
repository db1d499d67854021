#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fedsim/config_io.hpp"
#include "fedsim/data.hpp"
#include "fedsim/errors.hpp"
#include "fedsim/gradcheck.hpp"
#include "fedsim/orchestration.hpp"
#include "fedsim/reporting.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
    return buf;
}

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[40];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fnv1a_hex8(const std::string& s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%08" PRIx64,
                  (h >> 32) ^ (h & 0xFFFFFFFFULL));
    return buf;
}

int cmd_synth(const std::string& out_path, std::size_t n, int classes,
              double positive_rate, int vocab, std::uint64_t seed) {
    const auto examples =
        fedsim::make_synthetic(n, classes, vocab, positive_rate, seed);
    fedsim::save_jsonl(out_path, examples);
    std::map<int, std::size_t> histogram;
    for (const auto& ex : examples) ++histogram[ex.label];
    std::printf("wrote %zu examples to %s\n", examples.size(),
                out_path.c_str());
    for (const auto& [label, count] : histogram) {
        std::printf("class %d: %zu (%.2f%%)\n", label, count,
                    100.0 * static_cast<double>(count) /
                        static_cast<double>(examples.size()));
    }
    return 0;
}

int cmd_partition(const std::string& in_path, int k, std::size_t per_client,
                  std::uint64_t seed, const std::string& out_path) {
    const auto loaded = fedsim::load_jsonl(in_path, /*strict=*/true);
    const auto shards =
        fedsim::partition_iid(loaded.examples.size(), k, per_client, seed);
    json manifest;
    manifest["schema_version"] = fedsim::kSchemaVersion;
    manifest["source"] = in_path;
    manifest["num_examples"] = loaded.examples.size();
    manifest["k"] = k;
    manifest["per_client"] = per_client;
    manifest["seed"] = seed;
    manifest["leftover"] =
        loaded.examples.size() - static_cast<std::size_t>(k) * per_client;
    json shard_list = json::array();
    for (const auto& shard : shards) {
        shard_list.push_back({{"client_id", shard.client_id},
                              {"example_indices", shard.example_indices}});
    }
    manifest["shards"] = shard_list;
    std::ofstream out(out_path);
    if (!out) throw fedsim::IoError("cannot write " + out_path);
    out << manifest.dump(2) << "\n";
    std::printf("partitioned %zu examples into %d shards of %zu (%s)\n",
                loaded.examples.size(), k, per_client, out_path.c_str());
    return 0;
}

int cmd_gradcheck(const std::string& model, std::uint64_t seed) {
    std::vector<fedsim::ModelKind> kinds;
    if (model == "all") {
        kinds = {fedsim::ModelKind::logreg, fedsim::ModelKind::mlp,
                 fedsim::ModelKind::textcnn, fedsim::ModelKind::lstm};
    } else {
        kinds = {fedsim::model_kind_from_string(model)};
    }
    bool all_pass = true;
    for (const auto kind : kinds) {
        const auto spec = fedsim::gradcheck_spec(kind, seed);
        const auto params = fedsim::init_params(spec);
        const auto batch =
            fedsim::random_batch(spec, 5, fedsim::derive_seed(seed, 1));
        const auto result = fedsim::gradient_check(spec, params, batch);
        std::printf("%-8s max_rel_err=%.3e %s\n",
                    fedsim::to_string(kind).c_str(), result.max_rel_err,
                    result.pass ? "PASS" : "FAIL");
        all_pass = all_pass && result.pass;
    }
    return all_pass ? 0 : kExitRuntime;
}

int cmd_run(const std::string& config_path, int trials,
            const std::string& out_root, std::optional<int> workers,
            std::optional<int> rounds, std::optional<std::string> strategy,
            std::optional<double> epsilon, std::optional<std::uint64_t> seed) {
    fedsim::ExperimentConfig cfg = fedsim::load_experiment_config(config_path);
    if (workers) cfg.workers = *workers;
    if (rounds) cfg.agg.rounds_t = *rounds;
    if (strategy) cfg.agg.strategy = fedsim::strategy_from_string(*strategy);
    if (epsilon) cfg.agg.epsilon = *epsilon;
    if (seed) cfg.run_seed = *seed;
    if (trials < 1) throw fedsim::ConfigError("--trials: must be >= 1");
    fedsim::validate_experiment_config(cfg);

    const json cfg_json = fedsim::experiment_config_to_json(cfg);
    const fs::path run_dir = fs::path(out_root) /
                             (utc_timestamp() + "-" + fnv1a_hex8(cfg_json.dump()));
    fs::create_directories(run_dir);

    fedsim::RunManifest manifest;
    manifest.created_utc = iso_timestamp();
    manifest.config = cfg_json;
    manifest.trials = trials;
    manifest.curve_file = "curve.csv";

    std::vector<std::vector<fedsim::RoundLog>> all_logs;
    for (int i = 0; i < trials; ++i) {
        const auto trial_cfg = fedsim::trial_config(cfg, i);
        auto logs = fedsim::run_experiment(trial_cfg);
        const std::string name = "trial-" + std::to_string(i) + ".jsonl";
        fedsim::write_round_logs_jsonl((run_dir / name).string(), logs);
        manifest.log_files.push_back(name);
        const auto& last = logs.back();
        std::printf("trial %d: rounds=%zu final_loss=%s final_acc=%s\n", i,
                    logs.size(),
                    last.mean_client_loss
                        ? std::to_string(*last.mean_client_loss).c_str()
                        : "n/a",
                    last.test_accuracy
                        ? std::to_string(*last.test_accuracy).c_str()
                        : "n/a");
        all_logs.push_back(std::move(logs));
    }
    fedsim::write_curve_csv((run_dir / "curve.csv").string(), all_logs);
    fedsim::write_manifest((run_dir / "manifest.json").string(), manifest);
    std::printf("run directory: %s\n", run_dir.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic federated aggregation simulator"};
    app.require_subcommand(1);

    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
    std::string synth_out = "synthetic.jsonl";
    std::size_t synth_n = 1000;
    int synth_classes = 2;
    double synth_rate = 0.5;
    int synth_vocab = 120;
    std::uint64_t synth_seed = 0;
    synth->add_option("--out", synth_out, "Output JSONL path");
    synth->add_option("--n", synth_n, "Number of examples");
    synth->add_option("--classes", synth_classes, "Number of classes");
    synth->add_option("--positive-rate", synth_rate,
                      "Positive-class prior (binary tasks)");
    synth->add_option("--vocab", synth_vocab, "Synthetic vocabulary size");
    synth->add_option("--seed", synth_seed, "Generator seed");

    auto* partition =
        app.add_subcommand("partition", "Split a dataset into client shards");
    std::string part_in, part_out = "shards.json";
    int part_k = 1;
    std::size_t part_per_client = 1;
    std::uint64_t part_seed = 0;
    partition->add_option("--in", part_in, "Input JSONL path")->required();
    partition->add_option("--k", part_k, "Number of clients")->required();
    partition->add_option("--per-client", part_per_client,
                          "Examples per client")
        ->required();
    partition->add_option("--seed", part_seed, "Shuffle seed");
    partition->add_option("--out", part_out, "Shard manifest path");

    auto* gradcheck = app.add_subcommand(
        "gradcheck", "Check model gradients against finite differences");
    std::string gc_model = "all";
    std::uint64_t gc_seed = 42;
    gradcheck->add_option("--model", gc_model,
                          "logreg, mlp, textcnn, lstm or all");
    gradcheck->add_option("--seed", gc_seed, "Instance seed");

    auto* run = app.add_subcommand("run", "Run a federated experiment");
    std::string run_config, run_out = "out";
    int run_trials = 1;
    std::optional<int> run_workers, run_rounds;
    std::optional<std::string> run_strategy;
    std::optional<double> run_epsilon;
    std::optional<std::uint64_t> run_seed;
    run->add_option("--config", run_config, "Experiment config (JSON)")
        ->required();
    run->add_option("--trials", run_trials, "Independent trials");
    run->add_option("--out", run_out, "Output root directory");
    run->add_option("--workers", run_workers,
                    "Client worker threads (overrides config)");
    run->add_option("--rounds", run_rounds, "Rounds (overrides config)");
    run->add_option("--strategy", run_strategy, "Strategy (overrides config)");
    run->add_option("--epsilon", run_epsilon,
                    "Server stepsize (overrides config)");
    run->add_option("--seed", run_seed, "Run seed (overrides config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (synth->parsed()) {
            return cmd_synth(synth_out, synth_n, synth_classes, synth_rate,
                             synth_vocab, synth_seed);
        }
        if (partition->parsed()) {
            return cmd_partition(part_in, part_k, part_per_client, part_seed,
                                 part_out);
        }
        if (gradcheck->parsed()) {
            return cmd_gradcheck(gc_model, gc_seed);
        }
        if (run->parsed()) {
            return cmd_run(run_config, run_trials, run_out, run_workers,
                           run_rounds, run_strategy, run_epsilon, run_seed);
        }
    } catch (const fedsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
