#include "fedsim/orchestration.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "fedsim/errors.hpp"
#include "fedsim/metrics.hpp"
#include "fedsim/rng.hpp"

namespace fedsim {

namespace {

Batch gather_batch(const ModelSpec& spec, const Vocabulary& vocab,
                   const std::vector<LabeledExample>& examples,
                   const std::vector<std::size_t>& indices, int max_len) {
    Batch batch;
    batch.labels.reserve(indices.size());
    for (std::size_t idx : indices) {
        const auto& ex = examples[idx];
        if (ex.label >= spec.num_classes) {
            throw ConfigError("data: label " + std::to_string(ex.label) +
                              " >= model.num_classes (" +
                              std::to_string(spec.num_classes) + ")");
        }
        batch.labels.push_back(ex.label);
        if (uses_tokens(spec.kind)) {
            batch.token_rows.push_back(encode_tokens(vocab, ex.text, max_len));
        } else {
            batch.dense_rows.push_back(encode_bow(vocab, ex.text));
        }
    }
    return batch;
}

Batch slice_batch(const Batch& full, const std::vector<std::size_t>& rows) {
    Batch out;
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) {
        out.labels.push_back(full.labels[r]);
        if (!full.token_rows.empty()) out.token_rows.push_back(full.token_rows[r]);
        if (!full.dense_rows.empty()) out.dense_rows.push_back(full.dense_rows[r]);
    }
    return out;
}

std::vector<LabeledExample> load_dataset(const ExperimentConfig& cfg) {
    if (cfg.data.dataset_path) {
        auto loaded = load_jsonl(*cfg.data.dataset_path, /*strict=*/true);
        return std::move(loaded.examples);
    }
    const auto& s = *cfg.data.synthetic;
    return make_synthetic(s.num_examples, s.num_classes, s.vocab_size,
                          s.positive_rate, s.seed);
}

std::vector<std::int32_t> argmax_rows(const Matrix& probs) {
    std::vector<std::int32_t> out(probs.rows);
    for (std::size_t i = 0; i < probs.rows; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < probs.cols; ++j) {
            if (probs(i, j) > probs(i, best)) best = j;
        }
        out[i] = static_cast<std::int32_t>(best);
    }
    return out;
}

EvalReport evaluate(const ModelSpec& spec, const ParameterVector& theta,
                    const Batch& test) {
    const auto fwd = forward(spec, theta, test);
    EvalReport report;
    report.n_examples = test.size();
    report.accuracy = accuracy(argmax_rows(fwd.probs), test.labels);
    if (spec.num_classes == 2) {
        std::vector<double> pos_scores(test.size());
        for (std::size_t i = 0; i < test.size(); ++i) {
            pos_scores[i] = fwd.probs(i, 1);
        }
        try {
            report.auroc = auroc(pos_scores, test.labels);
        } catch (const MetricError&) {
            // single-class test set: report as absent
        }
    }
    return report;
}

// Runs fn(i) for i in [0, n) on `workers` threads. Results land by index, so
// the caller's reduction order never depends on scheduling.
template <typename Fn>
void parallel_for_index(std::size_t n, int workers, Fn&& fn) {
    int w = workers;
    if (w <= 0) {
        w = static_cast<int>(std::thread::hardware_concurrency());
        if (w < 1) w = 1;
    }
    w = std::min<int>(w, static_cast<int>(n));
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(w));
    for (int t = 0; t < w; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct PreparedData {
    Vocabulary vocab;
    ModelSpec spec;           // input_dim resolved against the vocabulary
    Batch test;
    std::vector<EncodedShard> shards;
};

PreparedData prepare(const ExperimentConfig& cfg,
                     const std::vector<LabeledExample>& examples) {
    PreparedData prep;
    const auto split = split_train_test(examples.size(),
                                        cfg.data.test_fraction,
                                        derive_seed(cfg.run_seed, kSeedSplit));
    prep.vocab = Vocabulary::build(examples, split.train, cfg.data.min_freq);
    prep.spec = cfg.model;
    if (prep.spec.input_dim == 0) {
        prep.spec.input_dim = static_cast<int>(prep.vocab.size());
    }
    const Batch train_all = gather_batch(prep.spec, prep.vocab, examples,
                                         split.train, cfg.data.max_len);
    prep.test = gather_batch(prep.spec, prep.vocab, examples, split.test,
                             cfg.data.max_len);

    const auto shards = partition_iid(split.train.size(),
                                      cfg.agg.total_clients_k,
                                      cfg.data.per_client,
                                      derive_seed(cfg.run_seed, kSeedPartition));
    prep.shards.reserve(shards.size());
    for (const auto& shard : shards) {
        prep.shards.push_back(
            {shard.client_id, slice_batch(train_all, shard.example_indices)});
    }
    return prep;
}

}  // namespace

void validate_experiment_config(const ExperimentConfig& cfg) {
    validate_agg_config(cfg.agg);
    if (cfg.data.dataset_path.has_value() == cfg.data.synthetic.has_value()) {
        throw ConfigError(
            "data: exactly one of dataset_path and synthetic must be set");
    }
    if (cfg.data.per_client < 1) {
        throw ConfigError("data.per_client: must be >= 1");
    }
    if (!(cfg.data.test_fraction > 0.0 && cfg.data.test_fraction < 1.0)) {
        throw ConfigError("data.test_fraction: must be in (0, 1)");
    }
    if (cfg.data.min_freq < 1) throw ConfigError("data.min_freq: must be >= 1");
    if (cfg.data.max_len < 1) throw ConfigError("data.max_len: must be >= 1");
    if (cfg.eval_every < 1) throw ConfigError("eval_every: must be >= 1");
    if (!(cfg.failure_rate >= 0.0 && cfg.failure_rate < 1.0)) {
        throw ConfigError("failure_rate: must be in [0, 1)");
    }
    if (cfg.workers < 0) throw ConfigError("workers: must be >= 0");
    if (cfg.cv_epochs < 1) throw ConfigError("cv_epochs: must be >= 1");
    if (cfg.model.num_classes < 2) {
        throw ConfigError("model.num_classes: must be >= 2");
    }
    if (cfg.model.input_dim < 0) {
        throw ConfigError("model.input_dim: must be >= 0 (0 = vocabulary size)");
    }
}

ClientUpdate local_training(const EncodedShard& shard,
                            const ParameterVector& theta,
                            const ModelSpec& spec, int epochs, int batch_size,
                            double lr, std::uint64_t shuffle_seed) {
    if (shard.batch.size() == 0) throw ConfigError("local_training: empty shard");
    if (epochs < 1) throw ConfigError("local_training: epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("local_training: batch_size must be >= 1");

    const std::size_t n = shard.batch.size();
    ParameterVector params = theta;
    std::vector<std::size_t> order(n);
    double final_epoch_loss = 0.0;
    for (int e = 0; e < epochs; ++e) {
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        Rng rng(derive_seed(shuffle_seed, static_cast<std::uint64_t>(e)));
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n;
             start += static_cast<std::size_t>(batch_size)) {
            const std::size_t stop =
                std::min(n, start + static_cast<std::size_t>(batch_size));
            const std::vector<std::size_t> rows(order.begin() + start,
                                                order.begin() + stop);
            const Batch mini = slice_batch(shard.batch, rows);
            const auto res = loss_and_gradient(spec, params, mini);
            loss_sum += res.loss * static_cast<double>(mini.size());
            params = sgd_step(params, res.gradient, lr);
        }
        if (e == epochs - 1) {
            final_epoch_loss = loss_sum / static_cast<double>(n);
        }
    }
    return {shard.client_id, std::move(params), n, final_epoch_loss};
}

std::vector<RoundLog> run_experiment(const ExperimentConfig& config) {
    validate_experiment_config(config);
    const auto examples = load_dataset(config);
    const PreparedData prep = prepare(config, examples);
    const auto& agg = config.agg;
    const auto k_total = static_cast<std::uint64_t>(agg.total_clients_k);

    ParameterVector theta = init_params(prep.spec);
    std::vector<RoundLog> logs;
    logs.reserve(static_cast<std::size_t>(agg.rounds_t));

    for (int t = 1; t <= agg.rounds_t; ++t) {
        const auto start = std::chrono::steady_clock::now();
        RoundLog log;
        log.round = t;
        log.sampled_clients = sample_clients(agg.total_clients_k,
                                             agg.fraction_c, t,
                                             agg.sampling_seed);

        std::vector<int> active;
        for (int cid : log.sampled_clients) {
            bool dropped = false;
            if (config.failure_rate > 0.0) {
                Rng coin(derive_seed(config.failure_seed,
                                     static_cast<std::uint64_t>(t),
                                     static_cast<std::uint64_t>(cid)));
                dropped = coin.bernoulli(config.failure_rate);
            }
            if (dropped) {
                log.dropped_clients.push_back(cid);
            } else {
                active.push_back(cid);
            }
        }

        std::vector<ClientUpdate> updates(active.size());
        parallel_for_index(active.size(), config.workers, [&](std::size_t i) {
            const int cid = active[i];
            const auto& shard = prep.shards[static_cast<std::size_t>(cid)];
            const auto seed = derive_seed(
                config.run_seed, kSeedLocal,
                static_cast<std::uint64_t>(t) * k_total +
                    static_cast<std::uint64_t>(cid));
            updates[i] = local_training(shard, theta, prep.spec,
                                        agg.local_epochs_e, agg.local_batch_b,
                                        agg.local_lr, seed);
        });

        if (!updates.empty()) {
            double loss_sum = 0.0;
            for (const auto& u : updates) loss_sum += u.train_loss;
            log.mean_client_loss = loss_sum / static_cast<double>(updates.size());

            switch (agg.strategy) {
                case Strategy::avgdiff: {
                    std::vector<ParameterVector> client_params;
                    client_params.reserve(updates.size());
                    for (const auto& u : updates) client_params.push_back(u.params);
                    theta = apply_avgdiff(theta, client_params, agg.epsilon);
                    break;
                }
                case Strategy::average:
                    theta = apply_average(updates);
                    break;
                case Strategy::fullbatch:
                    // under fault injection absent clients shrink the mean
                    if (log.dropped_clients.empty()) {
                        theta = apply_fullbatch(updates, agg.total_clients_k);
                    } else {
                        theta = apply_average(updates);
                    }
                    break;
            }
        }

        if (t % config.eval_every == 0 || t == agg.rounds_t) {
            const EvalReport report = evaluate(prep.spec, theta, prep.test);
            log.test_accuracy = report.accuracy;
            log.test_auroc = report.auroc;
        }
        log.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
        logs.push_back(std::move(log));
    }
    return logs;
}

ExperimentConfig trial_config(const ExperimentConfig& base, int trial) {
    ExperimentConfig cfg = base;
    const auto t = static_cast<std::uint64_t>(trial);
    cfg.run_seed = derive_seed(base.run_seed, kSeedTrial, 3 * t);
    cfg.agg.sampling_seed = derive_seed(base.run_seed, kSeedTrial, 3 * t + 1);
    cfg.model.init_seed = derive_seed(base.run_seed, kSeedTrial, 3 * t + 2);
    return cfg;
}

CvSummary run_cross_validation(const ExperimentConfig& config, int folds) {
    validate_experiment_config(config);
    if (folds < 2) throw ConfigError("cross_validation: folds must be >= 2");
    const auto examples = load_dataset(config);
    const auto n = examples.size();
    if (static_cast<std::size_t>(folds) > n) {
        throw ConfigError("cross_validation: more folds than examples");
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(derive_seed(config.run_seed, kSeedCv));
    rng.shuffle(order);

    CvSummary summary;
    for (int f = 0; f < folds; ++f) {
        const std::size_t lo = n * static_cast<std::size_t>(f) /
                               static_cast<std::size_t>(folds);
        const std::size_t hi = n * (static_cast<std::size_t>(f) + 1) /
                               static_cast<std::size_t>(folds);
        std::vector<std::size_t> test_idx(order.begin() + lo, order.begin() + hi);
        std::vector<std::size_t> train_idx;
        train_idx.reserve(n - (hi - lo));
        train_idx.insert(train_idx.end(), order.begin(), order.begin() + lo);
        train_idx.insert(train_idx.end(), order.begin() + hi, order.end());
        if (test_idx.empty() || train_idx.empty()) {
            throw ConfigError("cross_validation: degenerate fold sizes");
        }

        const Vocabulary vocab =
            Vocabulary::build(examples, train_idx, config.data.min_freq);
        ModelSpec spec = config.model;
        if (spec.input_dim == 0) spec.input_dim = static_cast<int>(vocab.size());
        const Batch train = gather_batch(spec, vocab, examples, train_idx,
                                         config.data.max_len);
        const Batch test = gather_batch(spec, vocab, examples, test_idx,
                                        config.data.max_len);

        const EncodedShard pool{0, train};
        const auto update = local_training(
            pool, init_params(spec), spec, config.cv_epochs,
            config.agg.local_batch_b, config.agg.local_lr,
            derive_seed(config.run_seed, kSeedCv,
                        static_cast<std::uint64_t>(f) + 1));
        summary.fold_accuracy.push_back(
            evaluate(spec, update.params, test).accuracy);
    }

    double sum = 0.0;
    for (double a : summary.fold_accuracy) sum += a;
    summary.mean = sum / static_cast<double>(folds);
    double ss = 0.0;
    for (double a : summary.fold_accuracy) {
        ss += (a - summary.mean) * (a - summary.mean);
    }
    summary.stddev = std::sqrt(ss / static_cast<double>(folds - 1));
    return summary;
}

}  // namespace fedsim
