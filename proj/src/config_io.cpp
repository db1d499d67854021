#include "fedsim/config_io.hpp"

#include <fstream>

#include "fedsim/errors.hpp"

namespace fedsim {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError("config: unknown key \"" + prefix + it.key() +
                              "\"");
        }
    }
}

const json* find(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

template <typename T>
T fetch(const json& j, const std::string& prefix, const char* key, T fallback) {
    const json* v = find(j, key);
    if (!v) return fallback;
    try {
        return v->get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: bad value for \"" + prefix + key + "\"");
    }
}

template <typename T>
T require(const json& j, const std::string& prefix, const char* key) {
    if (!find(j, key)) {
        throw ConfigError("config: missing key \"" + prefix + key + "\"");
    }
    return fetch<T>(j, prefix, key, T{});
}

ModelSpec model_from_json(const json& j) {
    check_keys(j, "model.",
               {"kind", "input_dim", "embed_dim", "hidden_dims", "num_classes",
                "conv_widths", "init_seed"});
    ModelSpec spec;
    spec.kind = model_kind_from_string(require<std::string>(j, "model.", "kind"));
    spec.input_dim = fetch<int>(j, "model.", "input_dim", 0);
    spec.embed_dim = fetch<int>(j, "model.", "embed_dim", 16);
    spec.num_classes = fetch<int>(j, "model.", "num_classes", 2);
    spec.conv_widths =
        fetch<std::vector<int>>(j, "model.", "conv_widths", {2, 3, 4});
    spec.init_seed = fetch<std::uint64_t>(j, "model.", "init_seed", 0);
    std::vector<int> default_hidden;
    switch (spec.kind) {
        case ModelKind::logreg: default_hidden = {}; break;
        case ModelKind::mlp: default_hidden = {16}; break;
        case ModelKind::textcnn: default_hidden = {8}; break;
        case ModelKind::lstm: default_hidden = {16}; break;
    }
    spec.hidden_dims =
        fetch<std::vector<int>>(j, "model.", "hidden_dims", default_hidden);
    return spec;
}

AggregationConfig agg_from_json(const json& j) {
    check_keys(j, "aggregation.",
               {"strategy", "epsilon", "fraction_c", "total_clients_k",
                "local_epochs_e", "local_batch_b", "rounds_t", "local_lr",
                "sampling_seed"});
    AggregationConfig agg;
    agg.strategy =
        strategy_from_string(require<std::string>(j, "aggregation.", "strategy"));
    agg.epsilon = fetch<double>(j, "aggregation.", "epsilon", 1.0);
    agg.fraction_c = fetch<double>(j, "aggregation.", "fraction_c", 1.0);
    agg.total_clients_k = require<int>(j, "aggregation.", "total_clients_k");
    agg.local_epochs_e = fetch<int>(j, "aggregation.", "local_epochs_e", 1);
    agg.local_batch_b = fetch<int>(j, "aggregation.", "local_batch_b", 10);
    agg.rounds_t = require<int>(j, "aggregation.", "rounds_t");
    agg.local_lr = fetch<double>(j, "aggregation.", "local_lr", 0.1);
    agg.sampling_seed = fetch<std::uint64_t>(j, "aggregation.", "sampling_seed", 0);
    return agg;
}

DataConfig data_from_json(const json& j) {
    check_keys(j, "data.",
               {"dataset_path", "synthetic", "per_client", "test_fraction",
                "min_freq", "max_len"});
    DataConfig data;
    if (const json* p = find(j, "dataset_path")) {
        data.dataset_path = p->get<std::string>();
    }
    if (const json* s = find(j, "synthetic")) {
        check_keys(*s, "data.synthetic.",
                   {"num_examples", "num_classes", "vocab_size",
                    "positive_rate", "seed"});
        SyntheticSpec synth;
        synth.num_examples =
            require<std::size_t>(*s, "data.synthetic.", "num_examples");
        synth.num_classes = fetch<int>(*s, "data.synthetic.", "num_classes", 2);
        synth.vocab_size = fetch<int>(*s, "data.synthetic.", "vocab_size", 120);
        synth.positive_rate =
            fetch<double>(*s, "data.synthetic.", "positive_rate", 0.5);
        synth.seed = fetch<std::uint64_t>(*s, "data.synthetic.", "seed", 0);
        data.synthetic = synth;
    }
    data.per_client = require<std::size_t>(j, "data.", "per_client");
    data.test_fraction = fetch<double>(j, "data.", "test_fraction", 0.2);
    data.min_freq = fetch<int>(j, "data.", "min_freq", 2);
    data.max_len = fetch<int>(j, "data.", "max_len", 32);
    return data;
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: root must be an object");
    check_keys(j, "",
               {"schema_version", "model", "aggregation", "data", "eval_every",
                "run_seed", "failure_rate", "failure_seed", "workers",
                "cv_epochs"});
    const int version = fetch<int>(j, "", "schema_version", 1);
    if (version != 1) {
        throw ConfigError("config: unsupported schema_version " +
                          std::to_string(version));
    }
    ExperimentConfig cfg;
    if (const json* m = find(j, "model")) {
        cfg.model = model_from_json(*m);
    } else {
        throw ConfigError("config: missing key \"model\"");
    }
    if (const json* a = find(j, "aggregation")) {
        cfg.agg = agg_from_json(*a);
    } else {
        throw ConfigError("config: missing key \"aggregation\"");
    }
    if (const json* d = find(j, "data")) {
        cfg.data = data_from_json(*d);
    } else {
        throw ConfigError("config: missing key \"data\"");
    }
    cfg.eval_every = fetch<int>(j, "", "eval_every", 1);
    cfg.run_seed = fetch<std::uint64_t>(j, "", "run_seed", 0);
    cfg.failure_rate = fetch<double>(j, "", "failure_rate", 0.0);
    cfg.failure_seed = fetch<std::uint64_t>(j, "", "failure_seed", 0);
    cfg.workers = fetch<int>(j, "", "workers", 0);
    cfg.cv_epochs = fetch<int>(j, "", "cv_epochs", 5);
    return cfg;
}

json experiment_config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = 1;
    j["model"] = {{"kind", to_string(cfg.model.kind)},
                  {"input_dim", cfg.model.input_dim},
                  {"embed_dim", cfg.model.embed_dim},
                  {"hidden_dims", cfg.model.hidden_dims},
                  {"num_classes", cfg.model.num_classes},
                  {"conv_widths", cfg.model.conv_widths},
                  {"init_seed", cfg.model.init_seed}};
    j["aggregation"] = {{"strategy", to_string(cfg.agg.strategy)},
                        {"epsilon", cfg.agg.epsilon},
                        {"fraction_c", cfg.agg.fraction_c},
                        {"total_clients_k", cfg.agg.total_clients_k},
                        {"local_epochs_e", cfg.agg.local_epochs_e},
                        {"local_batch_b", cfg.agg.local_batch_b},
                        {"rounds_t", cfg.agg.rounds_t},
                        {"local_lr", cfg.agg.local_lr},
                        {"sampling_seed", cfg.agg.sampling_seed}};
    json d;
    if (cfg.data.dataset_path) d["dataset_path"] = *cfg.data.dataset_path;
    if (cfg.data.synthetic) {
        d["synthetic"] = {{"num_examples", cfg.data.synthetic->num_examples},
                          {"num_classes", cfg.data.synthetic->num_classes},
                          {"vocab_size", cfg.data.synthetic->vocab_size},
                          {"positive_rate", cfg.data.synthetic->positive_rate},
                          {"seed", cfg.data.synthetic->seed}};
    }
    d["per_client"] = cfg.data.per_client;
    d["test_fraction"] = cfg.data.test_fraction;
    d["min_freq"] = cfg.data.min_freq;
    d["max_len"] = cfg.data.max_len;
    j["data"] = d;
    j["eval_every"] = cfg.eval_every;
    j["run_seed"] = cfg.run_seed;
    j["failure_rate"] = cfg.failure_rate;
    j["failure_seed"] = cfg.failure_seed;
    j["workers"] = cfg.workers;
    j["cv_epochs"] = cfg.cv_epochs;
    return j;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw ConfigError("config: " + path + " is not valid JSON");
    }
    return experiment_config_from_json(j);
}

}  // namespace fedsim
