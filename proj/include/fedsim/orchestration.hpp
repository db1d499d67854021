#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedsim/aggregation.hpp"
#include "fedsim/data.hpp"
#include "fedsim/model.hpp"

namespace fedsim {

// Child-seed tags hung off run_seed (see README "Seed tree").
enum SeedTag : std::uint64_t {
    kSeedSplit = 1,
    kSeedPartition = 2,
    kSeedLocal = 3,
    kSeedTrial = 4,
    kSeedCv = 5,
};

struct SyntheticSpec {
    std::size_t num_examples = 0;
    int num_classes = 2;
    int vocab_size = 120;
    double positive_rate = 0.5;
    std::uint64_t seed = 0;
};

struct DataConfig {
    std::optional<std::string> dataset_path;   // exactly one source is set
    std::optional<SyntheticSpec> synthetic;
    std::size_t per_client = 1;
    double test_fraction = 0.2;
    int min_freq = 2;
    int max_len = 32;
};

struct ExperimentConfig {
    ModelSpec model;              // input_dim 0 means "use vocabulary size"
    AggregationConfig agg;
    DataConfig data;
    int eval_every = 1;
    std::uint64_t run_seed = 0;
    double failure_rate = 0.0;    // fault injection, off by default
    std::uint64_t failure_seed = 0;
    int workers = 0;              // per-round client pool; 0 = CPU count
    int cv_epochs = 5;
};

void validate_experiment_config(const ExperimentConfig& cfg);

struct RoundLog {
    int round = 0;
    std::vector<int> sampled_clients;
    std::vector<int> dropped_clients;           // fault-injected this round
    std::optional<double> mean_client_loss;     // absent if all clients dropped
    std::optional<double> test_accuracy;        // absent off eval cadence
    std::optional<double> test_auroc;           // binary tasks only
    std::int64_t wall_ms = 0;
};

struct EncodedShard {
    int client_id = 0;
    Batch batch;
};

// E epochs of minibatch SGD from a copy of theta (batch size b, per-epoch
// seeded shuffle, last partial batch kept). train_loss is the
// example-weighted mean loss of the final epoch, measured before each step.
ClientUpdate local_training(const EncodedShard& shard,
                            const ParameterVector& theta,
                            const ModelSpec& spec, int epochs, int batch_size,
                            double lr, std::uint64_t shuffle_seed);

// The full round loop: sample, train sampled clients, aggregate, evaluate on
// the held-out global test set. Pure function of the config.
std::vector<RoundLog> run_experiment(const ExperimentConfig& config);

// Per-trial config with derived run/sampling/init seeds; the dataset itself
// stays fixed across trials.
ExperimentConfig trial_config(const ExperimentConfig& base, int trial);

struct CvSummary {
    std::vector<double> fold_accuracy;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation over folds
};

// Centralized k-fold baseline: no federation, one model per fold trained on
// the pooled training folds for cv_epochs.
CvSummary run_cross_validation(const ExperimentConfig& config, int folds);

}  // namespace fedsim
