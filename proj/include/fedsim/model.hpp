#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fedsim/vec.hpp"

namespace fedsim {

enum class ModelKind { logreg, mlp, textcnn, lstm };

ModelKind model_kind_from_string(const std::string& name);
std::string to_string(ModelKind kind);

// True for models that consume token-id sequences (and own an embedding
// table); false for models that consume dense feature vectors.
bool uses_tokens(ModelKind kind);

// Architecture descriptor. Equal fields give byte-identical initial
// parameter vectors.
//
// Field use per kind:
//   logreg   input_dim = feature width
//   mlp      input_dim = feature width, hidden_dims = layer widths (tanh)
//   textcnn  input_dim = vocabulary size, embed_dim, hidden_dims = {filters
//            per width}, conv_widths = parallel 1-d filter widths
//   lstm     input_dim = vocabulary size, embed_dim, hidden_dims = {hidden
//            state size}
struct ModelSpec {
    ModelKind kind = ModelKind::logreg;
    int input_dim = 0;
    int embed_dim = 0;
    std::vector<int> hidden_dims;
    int num_classes = 2;
    std::vector<int> conv_widths = {2, 3, 4};
    std::uint64_t init_seed = 0;
};

// One minibatch. Token models read token_rows (equal-length rows, id 0 =
// padding); dense models read dense_rows. labels[i] in [0, num_classes).
struct Batch {
    std::vector<std::vector<std::int32_t>> token_rows;
    std::vector<std::vector<double>> dense_rows;
    std::vector<std::int32_t> labels;

    std::size_t size() const { return labels.size(); }
};

struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

void validate_spec(const ModelSpec& spec);

// Pure function of the spec fields; documented layout in model.cpp.
std::size_t param_count(const ModelSpec& spec);

// Glorot-uniform weights, zero biases, drawn in layout order from an
// Rng(init_seed) stream. Deterministic.
ParameterVector init_params(const ModelSpec& spec);

struct ForwardResult {
    double loss = 0.0;      // mean cross-entropy over the batch
    Matrix probs;           // post-softmax, one row per example
};

ForwardResult forward(const ModelSpec& spec, const ParameterVector& params,
                      const Batch& batch);

struct GradResult {
    double loss = 0.0;
    ParameterVector gradient;
};

// Loss and d(loss)/d(params) in one pass.
GradResult loss_and_gradient(const ModelSpec& spec,
                             const ParameterVector& params, const Batch& batch);

ParameterVector backward(const ModelSpec& spec, const ParameterVector& params,
                         const Batch& batch);

// params - lr * gradient
ParameterVector sgd_step(const ParameterVector& params,
                         const ParameterVector& gradient, double lr);

}  // namespace fedsim
