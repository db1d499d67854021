#include "fedsim/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedsim/errors.hpp"
#include "fedsim/rng.hpp"

namespace fedsim {

Strategy strategy_from_string(const std::string& name) {
    if (name == "fullbatch") return Strategy::fullbatch;
    if (name == "average") return Strategy::average;
    if (name == "avgdiff") return Strategy::avgdiff;
    throw ConfigError("aggregation.strategy: unknown strategy \"" + name +
                      "\" (expected fullbatch, average or avgdiff)");
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::fullbatch: return "fullbatch";
        case Strategy::average: return "average";
        case Strategy::avgdiff: return "avgdiff";
    }
    return "?";
}

void validate_agg_config(const AggregationConfig& cfg) {
    if (cfg.strategy == Strategy::avgdiff &&
        !(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0)) {
        throw ConfigError("aggregation.epsilon: must be in (0, 1]");
    }
    if (!(cfg.fraction_c > 0.0 && cfg.fraction_c <= 1.0)) {
        throw ConfigError("aggregation.fraction_c: must be in (0, 1]");
    }
    if (cfg.total_clients_k < 1) {
        throw ConfigError("aggregation.total_clients_k: must be >= 1");
    }
    if (cfg.local_epochs_e < 1) {
        throw ConfigError("aggregation.local_epochs_e: must be >= 1");
    }
    if (cfg.local_batch_b < 1) {
        throw ConfigError("aggregation.local_batch_b: must be >= 1");
    }
    if (cfg.rounds_t < 1) {
        throw ConfigError("aggregation.rounds_t: must be >= 1");
    }
    if (!(cfg.local_lr > 0.0) || !std::isfinite(cfg.local_lr)) {
        throw ConfigError("aggregation.local_lr: must be > 0");
    }
    if (cfg.strategy == Strategy::fullbatch) {
        if (cfg.fraction_c != 1.0) {
            throw ConfigError("aggregation.fraction_c: fullbatch requires 1.0");
        }
        if (cfg.local_epochs_e != 1) {
            throw ConfigError("aggregation.local_epochs_e: fullbatch requires 1");
        }
    }
}

std::vector<int> sample_clients(int k, double c, int round_index,
                                std::uint64_t sampling_seed) {
    if (k < 1) throw ConfigError("sample_clients: k must be >= 1");
    if (!(c > 0.0 && c <= 1.0)) {
        throw ConfigError("sample_clients: fraction must be in (0, 1]");
    }
    const int m = std::max(static_cast<int>(std::floor(c * k)), 1);
    Rng rng(derive_seed(sampling_seed,
                        static_cast<std::uint64_t>(round_index)));
    return rng.sample_without_replacement(k, m);
}

double server_objective(const ParameterVector& theta,
                        const std::vector<ParameterVector>& client_params) {
    if (client_params.empty()) {
        throw ConfigError("server_objective: empty client set");
    }
    double total = 0.0;
    for (const auto& cp : client_params) {
        require_same_length(theta, cp, "server_objective");
        double sq = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double d = theta[i] - cp[i];
            sq += d * d;
        }
        total += sq;
    }
    return total / (2.0 * static_cast<double>(client_params.size()));
}

ParameterVector avg_difference(const ParameterVector& theta,
                               const std::vector<ParameterVector>& client_params) {
    if (client_params.empty()) {
        throw ConfigError("avg_difference: empty client set");
    }
    ParameterVector acc(theta.size(), 0.0);
    for (const auto& cp : client_params) {
        require_same_length(theta, cp, "avg_difference");
        for (std::size_t i = 0; i < theta.size(); ++i) {
            acc[i] += theta[i] - cp[i];
        }
    }
    const double inv = 1.0 / static_cast<double>(client_params.size());
    for (double& x : acc) x *= inv;
    return acc;
}

ParameterVector apply_avgdiff(const ParameterVector& theta,
                              const std::vector<ParameterVector>& client_params,
                              double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw ConfigError("apply_avgdiff: epsilon must be in (0, 1]");
    }
    const ParameterVector diff = avg_difference(theta, client_params);
    ParameterVector out = vec_axpy(-epsilon, diff, theta);
    ensure_finite(out, "apply_avgdiff");
    return out;
}

ParameterVector apply_average(const std::vector<ClientUpdate>& updates) {
    if (updates.empty()) throw ConfigError("apply_average: empty update set");
    std::vector<std::size_t> order(updates.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return updates[a].client_id < updates[b].client_id;
    });
    double total = 0.0;
    for (const auto& u : updates) {
        if (u.num_examples == 0) {
            throw ConfigError("apply_average: num_examples must be >= 1");
        }
        total += static_cast<double>(u.num_examples);
    }
    ParameterVector acc(updates.front().params.size(), 0.0);
    for (std::size_t idx : order) {
        const auto& u = updates[idx];
        require_same_length(acc, u.params, "apply_average");
        const double w = static_cast<double>(u.num_examples) / total;
        for (std::size_t i = 0; i < acc.size(); ++i) {
            acc[i] += w * u.params[i];
        }
    }
    ensure_finite(acc, "apply_average");
    return acc;
}

ParameterVector apply_fullbatch(const std::vector<ClientUpdate>& updates,
                                int k) {
    if (static_cast<int>(updates.size()) != k) {
        throw ConfigError("apply_fullbatch: got " +
                          std::to_string(updates.size()) + " updates for k=" +
                          std::to_string(k));
    }
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    for (const auto& u : updates) {
        if (u.client_id < 0 || u.client_id >= k ||
            seen[static_cast<std::size_t>(u.client_id)]) {
            throw ConfigError("apply_fullbatch: clients must be exactly 0.." +
                              std::to_string(k - 1));
        }
        seen[static_cast<std::size_t>(u.client_id)] = true;
    }
    return apply_average(updates);
}

}  // namespace fedsim
