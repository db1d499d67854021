#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedsim/vec.hpp"

namespace fedsim {

enum class Strategy { fullbatch, average, avgdiff };

Strategy strategy_from_string(const std::string& name);
std::string to_string(Strategy s);

struct AggregationConfig {
    Strategy strategy = Strategy::avgdiff;
    double epsilon = 1.0;        // server stepsize, avgdiff only
    double fraction_c = 1.0;     // fraction of clients sampled per round
    int total_clients_k = 1;
    int local_epochs_e = 1;
    int local_batch_b = 1;
    int rounds_t = 1;
    double local_lr = 0.1;
    std::uint64_t sampling_seed = 0;
};

// Throws ConfigError naming the offending field. fullbatch requires
// fraction_c = 1 and local_epochs_e = 1.
void validate_agg_config(const AggregationConfig& cfg);

// max(floor(c*k), 1) distinct ids, ascending, drawn without replacement from
// an Rng seeded with derive_seed(sampling_seed, round_index).
std::vector<int> sample_clients(int k, double c, int round_index,
                                std::uint64_t sampling_seed);

// sum_k (1/2n) * ||theta - theta_k||^2
double server_objective(const ParameterVector& theta,
                        const std::vector<ParameterVector>& client_params);

// Elementwise mean of (theta - theta_k); this is the gradient of
// server_objective at theta. Inputs must already be in ascending client-id
// order; summation runs in input order.
ParameterVector avg_difference(const ParameterVector& theta,
                               const std::vector<ParameterVector>& client_params);

// theta - epsilon * avg_difference(theta, client_params)
ParameterVector apply_avgdiff(const ParameterVector& theta,
                              const std::vector<ParameterVector>& client_params,
                              double epsilon);

struct ClientUpdate {
    int client_id = 0;
    ParameterVector params;
    std::size_t num_examples = 0;
    double train_loss = 0.0;
};

// Example-count-weighted mean sum_k (n_k / sum_j n_j) * theta_k, reduced in
// ascending client-id order whatever the input order.
ParameterVector apply_average(const std::vector<ClientUpdate>& updates);

// Same arithmetic as apply_average but requires exactly the full client set
// 0..k-1 (updates produced with a single local epoch).
ParameterVector apply_fullbatch(const std::vector<ClientUpdate>& updates,
                                int k);

}  // namespace fedsim
