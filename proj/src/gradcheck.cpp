#include "fedsim/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "fedsim/rng.hpp"

namespace fedsim {

ParameterVector finite_difference_gradient(const ModelSpec& spec,
                                           const ParameterVector& params,
                                           const Batch& batch, double h) {
    ParameterVector fd(params.size(), 0.0);
    ParameterVector probe = params;
    for (std::size_t i = 0; i < params.size(); ++i) {
        probe[i] = params[i] + h;
        const double up = forward(spec, probe, batch).loss;
        probe[i] = params[i] - h;
        const double down = forward(spec, probe, batch).loss;
        probe[i] = params[i];
        fd[i] = (up - down) / (2.0 * h);
    }
    return fd;
}

GradCheckResult gradient_check(const ModelSpec& spec,
                               const ParameterVector& params,
                               const Batch& batch, double h, double tol) {
    const ParameterVector grad = backward(spec, params, batch);
    const ParameterVector fd = finite_difference_gradient(spec, params, batch, h);
    GradCheckResult r;
    for (std::size_t i = 0; i < grad.size(); ++i) {
        const double denom = std::max(std::abs(grad[i]) + std::abs(fd[i]), 1e-6);
        r.max_rel_err = std::max(r.max_rel_err, std::abs(grad[i] - fd[i]) / denom);
    }
    r.pass = r.max_rel_err < tol;
    return r;
}

ModelSpec gradcheck_spec(ModelKind kind, std::uint64_t seed) {
    ModelSpec spec;
    spec.kind = kind;
    spec.num_classes = 3;
    spec.init_seed = seed;
    switch (kind) {
        case ModelKind::logreg:
            spec.input_dim = 6;
            break;
        case ModelKind::mlp:
            spec.input_dim = 5;
            spec.hidden_dims = {7, 4};
            break;
        case ModelKind::textcnn:
            spec.input_dim = 30;
            spec.embed_dim = 5;
            spec.hidden_dims = {4};
            spec.conv_widths = {2, 3, 4};
            break;
        case ModelKind::lstm:
            spec.input_dim = 30;
            spec.embed_dim = 5;
            spec.hidden_dims = {6};
            break;
    }
    return spec;
}

Batch random_batch(const ModelSpec& spec, std::size_t n, std::uint64_t seed,
                   std::size_t seq_len) {
    Rng rng(seed);
    Batch batch;
    for (std::size_t i = 0; i < n; ++i) {
        batch.labels.push_back(static_cast<std::int32_t>(
            rng.next_below(static_cast<std::uint64_t>(spec.num_classes))));
        if (uses_tokens(spec.kind)) {
            std::vector<std::int32_t> row(seq_len);
            for (auto& t : row) {
                t = static_cast<std::int32_t>(
                    rng.next_below(static_cast<std::uint64_t>(spec.input_dim)));
            }
            batch.token_rows.push_back(std::move(row));
        } else {
            std::vector<double> row(static_cast<std::size_t>(spec.input_dim));
            for (auto& x : row) x = rng.uniform(-1.0, 1.0);
            batch.dense_rows.push_back(std::move(row));
        }
    }
    return batch;
}

}  // namespace fedsim
