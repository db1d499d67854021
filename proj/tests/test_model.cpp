#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fedsim/gradcheck.hpp"
#include "fedsim/model.hpp"

using namespace fedsim;

namespace {

ModelSpec logreg_spec(int d, int c, std::uint64_t seed = 0) {
    ModelSpec s;
    s.kind = ModelKind::logreg;
    s.input_dim = d;
    s.num_classes = c;
    s.init_seed = seed;
    return s;
}

Batch dense_batch(std::vector<std::vector<double>> rows,
                  std::vector<std::int32_t> labels) {
    Batch b;
    b.dense_rows = std::move(rows);
    b.labels = std::move(labels);
    return b;
}

}  // namespace

TEST_CASE("param_count matches hand counts") {
    CHECK(param_count(logreg_spec(4, 2)) == 10);

    ModelSpec mlp;
    mlp.kind = ModelKind::mlp;
    mlp.input_dim = 3;
    mlp.hidden_dims = {5};
    mlp.num_classes = 2;
    CHECK(param_count(mlp) == 32);

    ModelSpec cnn;
    cnn.kind = ModelKind::textcnn;
    cnn.input_dim = 10;
    cnn.embed_dim = 4;
    cnn.hidden_dims = {3};
    cnn.conv_widths = {2, 3};
    cnn.num_classes = 2;
    // embed 40 + bank2 (3*8+3) + bank3 (3*12+3) + head (6*2+2)
    CHECK(param_count(cnn) == 40 + 27 + 39 + 14);

    ModelSpec lstm;
    lstm.kind = ModelKind::lstm;
    lstm.input_dim = 10;
    lstm.embed_dim = 4;
    lstm.hidden_dims = {3};
    lstm.num_classes = 2;
    // embed 40 + wx 4*12 + wh 3*12 + b 12 + head (3*2+2)
    CHECK(param_count(lstm) == 40 + 48 + 36 + 12 + 8);
}

TEST_CASE("init_params is deterministic and spec-invalid inputs throw") {
    const auto spec = logreg_spec(4, 2, 1234);
    const auto a = init_params(spec);
    const auto b = init_params(spec);
    CHECK(a.size() == 10);
    CHECK(a == b);

    auto other = spec;
    other.init_seed = 1235;
    CHECK(init_params(other) != a);

    CHECK_THROWS_AS(init_params(logreg_spec(4, 1)), ConfigError);
    CHECK_THROWS_AS(init_params(logreg_spec(0, 2)), ConfigError);

    ModelSpec bad_mlp;
    bad_mlp.kind = ModelKind::mlp;
    bad_mlp.input_dim = 3;
    bad_mlp.num_classes = 2;
    CHECK_THROWS_AS(init_params(bad_mlp), ConfigError);
}

TEST_CASE("zero-weight logreg gives uniform scores and ln(C) loss") {
    const auto spec = logreg_spec(3, 2);
    const ParameterVector zeros(param_count(spec), 0.0);
    const auto batch = dense_batch({{1, 2, 3}, {-1, 0, 1}}, {0, 1});
    const auto fwd = forward(spec, zeros, batch);
    CHECK(fwd.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(fwd.probs(i, 0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(fwd.probs(i, 1) == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("saturated true class drives loss to zero") {
    const auto spec = logreg_spec(1, 2);
    // weight column for class 1 very large, input 1.0
    ParameterVector params{0.0, 50.0, 0.0, 0.0};
    const auto fwd = forward(spec, params, dense_batch({{1.0}}, {1}));
    CHECK(fwd.loss < 1e-20);
    CHECK(fwd.probs(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("softmax rows sum to one and loss is non-negative") {
    for (auto kind : {ModelKind::logreg, ModelKind::mlp, ModelKind::textcnn,
                      ModelKind::lstm}) {
        const auto spec = gradcheck_spec(kind, 7);
        const auto params = init_params(spec);
        const auto batch = random_batch(spec, 6, 99);
        const auto fwd = forward(spec, params, batch);
        CHECK(fwd.loss >= 0.0);
        for (std::size_t i = 0; i < fwd.probs.rows; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < fwd.probs.cols; ++j) {
                sum += fwd.probs(i, j);
            }
            CHECK(std::abs(sum - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("balanced batch at zero params is an exact stationary point") {
    const auto spec = logreg_spec(3, 2);
    const ParameterVector zeros(param_count(spec), 0.0);
    const auto batch = dense_batch({{1, 2, 3}, {1, 2, 3}}, {0, 1});
    const auto grad = backward(spec, zeros, batch);
    for (double g : grad) CHECK(std::abs(g) < 1e-15);
}

TEST_CASE("logreg bias gradient is softmax minus one-hot") {
    const auto spec = logreg_spec(2, 2);
    const ParameterVector zeros(param_count(spec), 0.0);
    const auto grad = backward(spec, zeros, dense_batch({{0.3, -0.7}}, {1}));
    // bias entries live at the tail of the layout
    CHECK(grad[4] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(grad[5] == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("backward matches central finite differences for all kinds") {
    for (auto kind : {ModelKind::logreg, ModelKind::mlp, ModelKind::textcnn,
                      ModelKind::lstm}) {
        CAPTURE(to_string(kind));
        const auto spec = gradcheck_spec(kind, 42);
        const auto params = init_params(spec);
        const auto batch = random_batch(spec, 5, 4242);
        const auto result = gradient_check(spec, params, batch);
        CHECK(result.max_rel_err < 1e-4);
        CHECK(result.pass);
    }
}

// Straight-line reimplementation of the mlp forward pass, written against
// the documented layout only. Guards the main implementation's arithmetic.
TEST_CASE("mlp forward agrees with a naive reimplementation") {
    ModelSpec spec;
    spec.kind = ModelKind::mlp;
    spec.input_dim = 3;
    spec.hidden_dims = {5};
    spec.num_classes = 2;
    spec.init_seed = 42;
    const auto p = init_params(spec);
    REQUIRE(p.size() == 32);

    const std::vector<std::vector<double>> xs = {{0.5, -1.0, 2.0},
                                                 {1.0, 1.0, 1.0},
                                                 {-0.25, 0.75, -1.5},
                                                 {0.0, 0.0, 4.0}};
    const std::vector<std::int32_t> ys = {0, 1, 1, 0};

    double naive_loss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double h[5];
        for (int j = 0; j < 5; ++j) {
            double z = p[15 + j];  // b1
            for (int d = 0; d < 3; ++d) z += xs[i][d] * p[d * 5 + j];
            h[j] = std::tanh(z);
        }
        double s[2];
        for (int c = 0; c < 2; ++c) {
            double z = p[30 + c];  // b2
            for (int j = 0; j < 5; ++j) z += h[j] * p[20 + j * 2 + c];
            s[c] = z;
        }
        const double mx = std::max(s[0], s[1]);
        const double e0 = std::exp(s[0] - mx), e1 = std::exp(s[1] - mx);
        const double py = (ys[i] == 0 ? e0 : e1) / (e0 + e1);
        naive_loss += -std::log(py);
    }
    naive_loss /= 4.0;

    const auto fwd = forward(spec, p, dense_batch(xs, ys));
    CHECK(std::abs(fwd.loss - naive_loss) < 1e-12);
}

TEST_CASE("lstm gradient reaches the first token of a length-8 sequence") {
    const auto spec = gradcheck_spec(ModelKind::lstm, 5);
    const auto params = init_params(spec);
    Batch batch;
    batch.token_rows = {{5, 6, 7, 8, 9, 10, 11, 12}};
    batch.labels = {1};
    const auto grad = backward(spec, params, batch);
    // embedding row of token 5 sits at [5*embed_dim, 6*embed_dim)
    const auto e = static_cast<std::size_t>(spec.embed_dim);
    double norm = 0.0;
    for (std::size_t i = 5 * e; i < 6 * e; ++i) norm += std::abs(grad[i]);
    CHECK(norm > 1e-10);
}

TEST_CASE("lstm treats trailing padding as absent") {
    const auto spec = gradcheck_spec(ModelKind::lstm, 5);
    const auto params = init_params(spec);
    Batch padded, plain;
    padded.token_rows = {{5, 6, 7, 0, 0, 0}};
    padded.labels = {0};
    plain.token_rows = {{5, 6, 7}};
    plain.labels = {0};
    CHECK(forward(spec, params, padded).loss ==
          forward(spec, params, plain).loss);
}

TEST_CASE("forward/backward are reproducible") {
    const auto spec = gradcheck_spec(ModelKind::textcnn, 11);
    const auto params = init_params(spec);
    const auto batch = random_batch(spec, 4, 8);
    const auto a = forward(spec, params, batch);
    const auto b = forward(spec, params, batch);
    CHECK(a.loss == b.loss);
    CHECK(a.probs.data == b.probs.data);
    CHECK(backward(spec, params, batch) == backward(spec, params, batch));
}

TEST_CASE("sgd_step") {
    CHECK(sgd_step({1, 2}, {0, 0}, 0.1) == ParameterVector{1, 2});
    CHECK(sgd_step({1, 2}, {1, -1}, 0.5) == ParameterVector{0.5, 2.5});
    CHECK(sgd_step({1, 2}, {3, 4}, 0.0) == ParameterVector{1, 2});
    CHECK_THROWS_AS(sgd_step({1, 2}, {1}, 0.1), ShapeError);
}

TEST_CASE("shape errors on malformed inputs") {
    const auto spec = logreg_spec(3, 2);
    const auto params = init_params(spec);
    CHECK_THROWS_AS(forward(spec, params, dense_batch({{1, 2}}, {0})),
                    ShapeError);
    CHECK_THROWS_AS(forward(spec, params, dense_batch({{1, 2, 3}}, {2})),
                    ShapeError);
    CHECK_THROWS_AS(forward(spec, {1.0, 2.0}, dense_batch({{1, 2, 3}}, {0})),
                    ShapeError);
    Batch empty;
    CHECK_THROWS_AS(forward(spec, params, empty), ShapeError);

    const auto cnn = gradcheck_spec(ModelKind::textcnn, 3);
    const auto cnn_params = init_params(cnn);
    Batch short_row;
    short_row.token_rows = {{1, 2}};  // narrower than the widest filter
    short_row.labels = {0};
    CHECK_THROWS_AS(forward(cnn, cnn_params, short_row), ShapeError);
    Batch bad_id;
    bad_id.token_rows = {{1, 2, 3, 4, 5, 6, 7, 1000}};
    bad_id.labels = {0};
    CHECK_THROWS_AS(forward(cnn, cnn_params, bad_id), ShapeError);
}
