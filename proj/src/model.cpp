#include "fedsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "fedsim/errors.hpp"
#include "fedsim/rng.hpp"

// Parameter layouts (row-major matrices, flattened in the order listed):
//
//   logreg   [W (input_dim x C)] [b (C)]
//   mlp      per layer l over widths {input_dim, hidden..., C}:
//            [W_l (d_{l-1} x d_l)] [b_l (d_l)]; tanh on hidden layers
//   textcnn  [E (V x embed)]
//            per width w in conv_widths order:
//              [K_w (F x (w*embed))] [b_w (F)]
//            [W_head ((nw*F) x C)] [b_head (C)]
//            filter rows are position-major: K_w[f][j*embed + e]
//   lstm     [E (V x embed)] [Wx (embed x 4H)] [Wh (H x 4H)] [b (4H)]
//            [W_head (H x C)] [b_head (C)]
//            gate column blocks ordered i, f, g, o
//
// Weights are drawn uniform(-s, s), s = sqrt(6 / (fan_in + fan_out)), in
// layout order from a single Rng(init_seed) stream; biases are zero and
// consume no draws. The embedding table counts fan_in = V, fan_out = embed;
// the combined LSTM input/recurrent matrices count fan_out = 4H.

namespace fedsim {

namespace {

struct LogregLayout {
    std::size_t w = 0, b = 0, total = 0;
};

LogregLayout logreg_layout(const ModelSpec& s) {
    LogregLayout l;
    const auto d = static_cast<std::size_t>(s.input_dim);
    const auto c = static_cast<std::size_t>(s.num_classes);
    l.w = 0;
    l.b = d * c;
    l.total = d * c + c;
    return l;
}

struct MlpLayout {
    std::vector<int> dims;  // input_dim, hidden..., num_classes
    std::vector<std::size_t> w, b;
    std::size_t total = 0;
};

MlpLayout mlp_layout(const ModelSpec& s) {
    MlpLayout l;
    l.dims.push_back(s.input_dim);
    for (int h : s.hidden_dims) l.dims.push_back(h);
    l.dims.push_back(s.num_classes);
    std::size_t off = 0;
    for (std::size_t i = 0; i + 1 < l.dims.size(); ++i) {
        const auto in = static_cast<std::size_t>(l.dims[i]);
        const auto out = static_cast<std::size_t>(l.dims[i + 1]);
        l.w.push_back(off);
        off += in * out;
        l.b.push_back(off);
        off += out;
    }
    l.total = off;
    return l;
}

struct CnnLayout {
    std::size_t embed = 0;
    std::vector<std::size_t> k, kb;
    std::size_t head_w = 0, head_b = 0, total = 0;
    int filters = 0;
    std::size_t concat = 0;  // nw * filters
};

CnnLayout cnn_layout(const ModelSpec& s) {
    CnnLayout l;
    l.filters = s.hidden_dims.front();
    const auto v = static_cast<std::size_t>(s.input_dim);
    const auto e = static_cast<std::size_t>(s.embed_dim);
    const auto f = static_cast<std::size_t>(l.filters);
    const auto c = static_cast<std::size_t>(s.num_classes);
    std::size_t off = v * e;
    for (int w : s.conv_widths) {
        l.k.push_back(off);
        off += f * static_cast<std::size_t>(w) * e;
        l.kb.push_back(off);
        off += f;
    }
    l.concat = s.conv_widths.size() * f;
    l.head_w = off;
    off += l.concat * c;
    l.head_b = off;
    off += c;
    l.total = off;
    return l;
}

struct LstmLayout {
    std::size_t embed = 0, wx = 0, wh = 0, b = 0, head_w = 0, head_b = 0,
                total = 0;
    int hidden = 0;
};

LstmLayout lstm_layout(const ModelSpec& s) {
    LstmLayout l;
    l.hidden = s.hidden_dims.front();
    const auto v = static_cast<std::size_t>(s.input_dim);
    const auto e = static_cast<std::size_t>(s.embed_dim);
    const auto h = static_cast<std::size_t>(l.hidden);
    const auto c = static_cast<std::size_t>(s.num_classes);
    l.embed = 0;
    l.wx = v * e;
    l.wh = l.wx + e * 4 * h;
    l.b = l.wh + h * 4 * h;
    l.head_w = l.b + 4 * h;
    l.head_b = l.head_w + h * c;
    l.total = l.head_b + c;
    return l;
}

// scores -> probabilities in place; returns -log p[label].
double softmax_ce(std::vector<double>& scores, int label) {
    double mx = scores[0];
    for (double v : scores) mx = std::max(mx, v);
    double sum = 0.0;
    for (double& v : scores) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : scores) v /= sum;
    return -std::log(scores[static_cast<std::size_t>(label)]);
}

void head_scores(const double* u, std::size_t d, const double* w,
                 const double* b, std::size_t c, std::vector<double>& scores) {
    scores.assign(c, 0.0);
    for (std::size_t j = 0; j < c; ++j) scores[j] = b[j];
    for (std::size_t i = 0; i < d; ++i) {
        const double ui = u[i];
        if (ui == 0.0) continue;
        const double* row = w + i * c;
        for (std::size_t j = 0; j < c; ++j) scores[j] += ui * row[j];
    }
}

// dscores -> head grads and du. du may be null (logreg input needs no grad).
void head_backward(const double* u, std::size_t d, const double* w,
                   std::size_t c, const std::vector<double>& dscores,
                   double* dw, double* db, double* du) {
    for (std::size_t j = 0; j < c; ++j) db[j] += dscores[j];
    for (std::size_t i = 0; i < d; ++i) {
        const double ui = u[i];
        const double* wrow = w + i * c;
        double* dwrow = dw + i * c;
        double acc = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            dwrow[j] += ui * dscores[j];
            acc += wrow[j] * dscores[j];
        }
        if (du) du[i] = acc;
    }
}

void validate_batch(const ModelSpec& spec, const Batch& batch) {
    if (batch.labels.empty()) throw ShapeError("batch: empty");
    for (std::int32_t y : batch.labels) {
        if (y < 0 || y >= spec.num_classes) {
            throw ShapeError("batch: label " + std::to_string(y) +
                             " out of range [0, " +
                             std::to_string(spec.num_classes) + ")");
        }
    }
    if (uses_tokens(spec.kind)) {
        if (batch.token_rows.size() != batch.labels.size()) {
            throw ShapeError("batch: token_rows/labels length mismatch");
        }
        const std::size_t len = batch.token_rows.front().size();
        if (len == 0) throw ShapeError("batch: empty token row");
        int min_len = 1;
        if (spec.kind == ModelKind::textcnn) {
            min_len = *std::max_element(spec.conv_widths.begin(),
                                        spec.conv_widths.end());
        }
        if (static_cast<int>(len) < min_len) {
            throw ShapeError("batch: sequence shorter than widest filter");
        }
        for (const auto& row : batch.token_rows) {
            if (row.size() != len) {
                throw ShapeError("batch: ragged token rows");
            }
            for (std::int32_t t : row) {
                if (t < 0 || t >= spec.input_dim) {
                    throw ShapeError("batch: token id " + std::to_string(t) +
                                     " out of range [0, " +
                                     std::to_string(spec.input_dim) + ")");
                }
            }
        }
    } else {
        if (batch.dense_rows.size() != batch.labels.size()) {
            throw ShapeError("batch: dense_rows/labels length mismatch");
        }
        for (const auto& row : batch.dense_rows) {
            if (row.size() != static_cast<std::size_t>(spec.input_dim)) {
                throw ShapeError("batch: feature row width " +
                                 std::to_string(row.size()) + ", expected " +
                                 std::to_string(spec.input_dim));
            }
        }
    }
}

void validate_params(const ModelSpec& spec, const ParameterVector& params) {
    const std::size_t want = param_count(spec);
    if (params.size() != want) {
        throw ShapeError("params: length " + std::to_string(params.size()) +
                         ", spec requires " + std::to_string(want));
    }
}

// Each run_* computes the mean batch loss; fills probs rows when probs is
// non-null and accumulates d(loss)/d(params) when grad is non-null, so the
// forward arithmetic is shared between both entry points.

double run_logreg(const ModelSpec& spec, const double* p, const Batch& batch,
                  Matrix* probs, double* grad) {
    const auto l = logreg_layout(spec);
    const auto d = static_cast<std::size_t>(spec.input_dim);
    const auto c = static_cast<std::size_t>(spec.num_classes);
    const std::size_t n = batch.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> scores;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* u = batch.dense_rows[i].data();
        head_scores(u, d, p + l.w, p + l.b, c, scores);
        loss += softmax_ce(scores, batch.labels[i]);
        if (probs) {
            for (std::size_t j = 0; j < c; ++j) (*probs)(i, j) = scores[j];
        }
        if (grad) {
            scores[static_cast<std::size_t>(batch.labels[i])] -= 1.0;
            for (double& v : scores) v *= inv_n;
            head_backward(u, d, p + l.w, c, scores, grad + l.w, grad + l.b,
                          nullptr);
        }
    }
    return loss * inv_n;
}

double run_mlp(const ModelSpec& spec, const double* p, const Batch& batch,
               Matrix* probs, double* grad) {
    const auto l = mlp_layout(spec);
    const std::size_t layers = l.w.size();
    const std::size_t n = batch.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    double loss = 0.0;
    std::vector<std::vector<double>> act(layers + 1);
    std::vector<double> delta, next_delta;
    for (std::size_t i = 0; i < n; ++i) {
        act[0] = batch.dense_rows[i];
        for (std::size_t li = 0; li < layers; ++li) {
            const auto in = static_cast<std::size_t>(l.dims[li]);
            const auto out = static_cast<std::size_t>(l.dims[li + 1]);
            head_scores(act[li].data(), in, p + l.w[li], p + l.b[li], out,
                        act[li + 1]);
            if (li + 1 < layers) {
                for (double& v : act[li + 1]) v = std::tanh(v);
            }
        }
        loss += softmax_ce(act[layers], batch.labels[i]);
        const auto c = static_cast<std::size_t>(spec.num_classes);
        if (probs) {
            for (std::size_t j = 0; j < c; ++j) (*probs)(i, j) = act[layers][j];
        }
        if (grad) {
            delta = act[layers];
            delta[static_cast<std::size_t>(batch.labels[i])] -= 1.0;
            for (double& v : delta) v *= inv_n;
            for (std::size_t li = layers; li-- > 0;) {
                const auto in = static_cast<std::size_t>(l.dims[li]);
                const auto out = static_cast<std::size_t>(l.dims[li + 1]);
                next_delta.assign(in, 0.0);
                head_backward(act[li].data(), in, p + l.w[li], out, delta,
                              grad + l.w[li], grad + l.b[li],
                              li > 0 ? next_delta.data() : nullptr);
                if (li > 0) {
                    // through tanh of the previous layer
                    for (std::size_t j = 0; j < in; ++j) {
                        next_delta[j] *= 1.0 - act[li][j] * act[li][j];
                    }
                    delta = next_delta;
                }
            }
        }
    }
    return loss * inv_n;
}

double run_textcnn(const ModelSpec& spec, const double* p, const Batch& batch,
                   Matrix* probs, double* grad) {
    const auto l = cnn_layout(spec);
    const auto e = static_cast<std::size_t>(spec.embed_dim);
    const auto f = static_cast<std::size_t>(l.filters);
    const auto c = static_cast<std::size_t>(spec.num_classes);
    const std::size_t n = batch.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    double loss = 0.0;

    std::vector<double> pooled(l.concat);      // tanh of best window
    std::vector<std::size_t> best(l.concat);   // argmax window position
    std::vector<double> scores, du;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = batch.token_rows[i];
        const std::size_t len = row.size();
        for (std::size_t bi = 0; bi < l.k.size(); ++bi) {
            const auto w = static_cast<std::size_t>(spec.conv_widths[bi]);
            const double* kw = p + l.k[bi];
            const double* kb = p + l.kb[bi];
            for (std::size_t fi = 0; fi < f; ++fi) {
                const double* filt = kw + fi * w * e;
                double mx = 0.0;
                std::size_t mp = 0;
                for (std::size_t pos = 0; pos + w <= len; ++pos) {
                    double a = kb[fi];
                    for (std::size_t j = 0; j < w; ++j) {
                        const double* x =
                            p + l.embed +
                            static_cast<std::size_t>(row[pos + j]) * e;
                        const double* kj = filt + j * e;
                        for (std::size_t ei = 0; ei < e; ++ei) {
                            a += x[ei] * kj[ei];
                        }
                    }
                    if (pos == 0 || a > mx) {
                        mx = a;
                        mp = pos;
                    }
                }
                // tanh is monotone, so pooling pre-activations is the same
                pooled[bi * f + fi] = std::tanh(mx);
                best[bi * f + fi] = mp;
            }
        }
        head_scores(pooled.data(), l.concat, p + l.head_w, p + l.head_b, c,
                    scores);
        loss += softmax_ce(scores, batch.labels[i]);
        if (probs) {
            for (std::size_t j = 0; j < c; ++j) (*probs)(i, j) = scores[j];
        }
        if (grad) {
            scores[static_cast<std::size_t>(batch.labels[i])] -= 1.0;
            for (double& v : scores) v *= inv_n;
            du.assign(l.concat, 0.0);
            head_backward(pooled.data(), l.concat, p + l.head_w, c, scores,
                          grad + l.head_w, grad + l.head_b, du.data());
            for (std::size_t bi = 0; bi < l.k.size(); ++bi) {
                const auto w = static_cast<std::size_t>(spec.conv_widths[bi]);
                const double* kw = p + l.k[bi];
                for (std::size_t fi = 0; fi < f; ++fi) {
                    const double h = pooled[bi * f + fi];
                    const double da = du[bi * f + fi] * (1.0 - h * h);
                    if (da == 0.0) continue;
                    const std::size_t pos = best[bi * f + fi];
                    const double* filt = kw + fi * w * e;
                    double* dfilt = grad + l.k[bi] + fi * w * e;
                    grad[l.kb[bi] + fi] += da;
                    for (std::size_t j = 0; j < w; ++j) {
                        const auto tok = static_cast<std::size_t>(row[pos + j]);
                        const double* x = p + l.embed + tok * e;
                        double* dx = grad + l.embed + tok * e;
                        const double* kj = filt + j * e;
                        double* dkj = dfilt + j * e;
                        for (std::size_t ei = 0; ei < e; ++ei) {
                            dkj[ei] += da * x[ei];
                            dx[ei] += da * kj[ei];
                        }
                    }
                }
            }
        }
    }
    return loss * inv_n;
}

// Trailing id-0 tokens are padding and are not stepped over; an all-padding
// row is processed as a single step.
std::size_t effective_length(const std::vector<std::int32_t>& row) {
    std::size_t len = row.size();
    while (len > 1 && row[len - 1] == 0) --len;
    return len;
}

double run_lstm(const ModelSpec& spec, const double* p, const Batch& batch,
                Matrix* probs, double* grad) {
    const auto l = lstm_layout(spec);
    const auto e = static_cast<std::size_t>(spec.embed_dim);
    const auto h = static_cast<std::size_t>(l.hidden);
    const auto c = static_cast<std::size_t>(spec.num_classes);
    const std::size_t g4 = 4 * h;
    const std::size_t n = batch.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    double loss = 0.0;

    // per-step caches, indexed [t*stride + j]; gate block order i,f,g,o
    std::vector<double> gates, cell, cell_tanh, hidden;
    std::vector<double> scores, dh(h), dc(h), dz(g4), dh_prev(h);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = batch.token_rows[i];
        const std::size_t len = effective_length(row);
        gates.assign(len * g4, 0.0);
        cell.assign(len * h, 0.0);
        cell_tanh.assign(len * h, 0.0);
        hidden.assign(len * h, 0.0);

        for (std::size_t t = 0; t < len; ++t) {
            const double* x =
                p + l.embed + static_cast<std::size_t>(row[t]) * e;
            const double* h_prev = t > 0 ? &hidden[(t - 1) * h] : nullptr;
            double* z = &gates[t * g4];
            for (std::size_t j = 0; j < g4; ++j) z[j] = p[l.b + j];
            for (std::size_t ei = 0; ei < e; ++ei) {
                const double xv = x[ei];
                const double* wrow = p + l.wx + ei * g4;
                for (std::size_t j = 0; j < g4; ++j) z[j] += xv * wrow[j];
            }
            if (h_prev) {
                for (std::size_t hi = 0; hi < h; ++hi) {
                    const double hv = h_prev[hi];
                    const double* wrow = p + l.wh + hi * g4;
                    for (std::size_t j = 0; j < g4; ++j) z[j] += hv * wrow[j];
                }
            }
            for (std::size_t j = 0; j < h; ++j) {
                const double ig = 1.0 / (1.0 + std::exp(-z[j]));
                const double fg = 1.0 / (1.0 + std::exp(-z[h + j]));
                const double gg = std::tanh(z[2 * h + j]);
                const double og = 1.0 / (1.0 + std::exp(-z[3 * h + j]));
                z[j] = ig;
                z[h + j] = fg;
                z[2 * h + j] = gg;
                z[3 * h + j] = og;
                const double c_prev = t > 0 ? cell[(t - 1) * h + j] : 0.0;
                const double ct = fg * c_prev + ig * gg;
                cell[t * h + j] = ct;
                const double th = std::tanh(ct);
                cell_tanh[t * h + j] = th;
                hidden[t * h + j] = og * th;
            }
        }

        const double* h_last = &hidden[(len - 1) * h];
        head_scores(h_last, h, p + l.head_w, p + l.head_b, c, scores);
        loss += softmax_ce(scores, batch.labels[i]);
        if (probs) {
            for (std::size_t j = 0; j < c; ++j) (*probs)(i, j) = scores[j];
        }
        if (!grad) continue;

        scores[static_cast<std::size_t>(batch.labels[i])] -= 1.0;
        for (double& v : scores) v *= inv_n;
        std::fill(dh.begin(), dh.end(), 0.0);
        std::fill(dc.begin(), dc.end(), 0.0);
        head_backward(h_last, h, p + l.head_w, c, scores, grad + l.head_w,
                      grad + l.head_b, dh.data());

        for (std::size_t t = len; t-- > 0;) {
            const double* z = &gates[t * g4];
            for (std::size_t j = 0; j < h; ++j) {
                const double ig = z[j], fg = z[h + j], gg = z[2 * h + j],
                             og = z[3 * h + j];
                const double th = cell_tanh[t * h + j];
                const double c_prev = t > 0 ? cell[(t - 1) * h + j] : 0.0;
                const double dct = dc[j] + dh[j] * og * (1.0 - th * th);
                dz[j] = dct * gg * ig * (1.0 - ig);                   // input
                dz[h + j] = dct * c_prev * fg * (1.0 - fg);           // forget
                dz[2 * h + j] = dct * ig * (1.0 - gg * gg);           // cand
                dz[3 * h + j] = dh[j] * th * og * (1.0 - og);         // output
                dc[j] = dct * fg;
            }
            for (std::size_t j = 0; j < g4; ++j) grad[l.b + j] += dz[j];
            const double* x =
                p + l.embed + static_cast<std::size_t>(row[t]) * e;
            double* dx = grad + l.embed + static_cast<std::size_t>(row[t]) * e;
            for (std::size_t ei = 0; ei < e; ++ei) {
                const double xv = x[ei];
                const double* wrow = p + l.wx + ei * g4;
                double* dwrow = grad + l.wx + ei * g4;
                double acc = 0.0;
                for (std::size_t j = 0; j < g4; ++j) {
                    dwrow[j] += xv * dz[j];
                    acc += wrow[j] * dz[j];
                }
                dx[ei] += acc;
            }
            if (t > 0) {
                const double* h_prev = &hidden[(t - 1) * h];
                for (std::size_t hi = 0; hi < h; ++hi) {
                    const double hv = h_prev[hi];
                    const double* wrow = p + l.wh + hi * g4;
                    double* dwrow = grad + l.wh + hi * g4;
                    double acc = 0.0;
                    for (std::size_t j = 0; j < g4; ++j) {
                        dwrow[j] += hv * dz[j];
                        acc += wrow[j] * dz[j];
                    }
                    dh_prev[hi] = acc;
                }
                dh = dh_prev;
            }
        }
    }
    return loss * inv_n;
}

double dispatch(const ModelSpec& spec, const ParameterVector& params,
                const Batch& batch, Matrix* probs, ParameterVector* grad) {
    validate_spec(spec);
    validate_params(spec, params);
    validate_batch(spec, batch);
    double* g = nullptr;
    if (grad) {
        grad->assign(params.size(), 0.0);
        g = grad->data();
    }
    switch (spec.kind) {
        case ModelKind::logreg:
            return run_logreg(spec, params.data(), batch, probs, g);
        case ModelKind::mlp:
            return run_mlp(spec, params.data(), batch, probs, g);
        case ModelKind::textcnn:
            return run_textcnn(spec, params.data(), batch, probs, g);
        case ModelKind::lstm:
            return run_lstm(spec, params.data(), batch, probs, g);
    }
    throw ConfigError("unknown model kind");
}

}  // namespace

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "logreg") return ModelKind::logreg;
    if (name == "mlp") return ModelKind::mlp;
    if (name == "textcnn") return ModelKind::textcnn;
    if (name == "lstm") return ModelKind::lstm;
    throw ConfigError("unknown model kind \"" + name +
                      "\" (expected logreg, mlp, textcnn or lstm)");
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::logreg: return "logreg";
        case ModelKind::mlp: return "mlp";
        case ModelKind::textcnn: return "textcnn";
        case ModelKind::lstm: return "lstm";
    }
    return "?";
}

bool uses_tokens(ModelKind kind) {
    return kind == ModelKind::textcnn || kind == ModelKind::lstm;
}

void validate_spec(const ModelSpec& spec) {
    if (spec.num_classes < 2) {
        throw ConfigError("model.num_classes must be >= 2");
    }
    if (spec.input_dim < 1) {
        throw ConfigError("model.input_dim must be >= 1");
    }
    switch (spec.kind) {
        case ModelKind::logreg:
            break;
        case ModelKind::mlp:
            if (spec.hidden_dims.empty()) {
                throw ConfigError("model.hidden_dims: mlp needs >= 1 layer");
            }
            for (int h : spec.hidden_dims) {
                if (h < 1) throw ConfigError("model.hidden_dims: widths must be >= 1");
            }
            break;
        case ModelKind::textcnn:
            if (spec.embed_dim < 1) {
                throw ConfigError("model.embed_dim must be >= 1");
            }
            if (spec.hidden_dims.size() != 1 || spec.hidden_dims[0] < 1) {
                throw ConfigError(
                    "model.hidden_dims: textcnn takes exactly {filters_per_width}");
            }
            if (spec.conv_widths.empty()) {
                throw ConfigError("model.conv_widths must be non-empty");
            }
            for (int w : spec.conv_widths) {
                if (w < 1) throw ConfigError("model.conv_widths: widths must be >= 1");
            }
            break;
        case ModelKind::lstm:
            if (spec.embed_dim < 1) {
                throw ConfigError("model.embed_dim must be >= 1");
            }
            if (spec.hidden_dims.size() != 1 || spec.hidden_dims[0] < 1) {
                throw ConfigError(
                    "model.hidden_dims: lstm takes exactly {hidden_size}");
            }
            break;
    }
}

std::size_t param_count(const ModelSpec& spec) {
    validate_spec(spec);
    switch (spec.kind) {
        case ModelKind::logreg: return logreg_layout(spec).total;
        case ModelKind::mlp: return mlp_layout(spec).total;
        case ModelKind::textcnn: return cnn_layout(spec).total;
        case ModelKind::lstm: return lstm_layout(spec).total;
    }
    throw ConfigError("unknown model kind");
}

ParameterVector init_params(const ModelSpec& spec) {
    validate_spec(spec);
    ParameterVector out(param_count(spec), 0.0);
    Rng rng(spec.init_seed);
    auto draw = [&](std::size_t off, std::size_t count, int fan_in,
                    int fan_out) {
        const double s = std::sqrt(6.0 / (fan_in + fan_out));
        for (std::size_t i = 0; i < count; ++i) {
            out[off + i] = rng.uniform(-s, s);
        }
    };
    switch (spec.kind) {
        case ModelKind::logreg: {
            const auto l = logreg_layout(spec);
            draw(l.w, l.b - l.w, spec.input_dim, spec.num_classes);
            break;
        }
        case ModelKind::mlp: {
            const auto l = mlp_layout(spec);
            for (std::size_t i = 0; i < l.w.size(); ++i) {
                draw(l.w[i], l.b[i] - l.w[i], l.dims[i], l.dims[i + 1]);
            }
            break;
        }
        case ModelKind::textcnn: {
            const auto l = cnn_layout(spec);
            draw(l.embed, static_cast<std::size_t>(spec.input_dim) *
                              static_cast<std::size_t>(spec.embed_dim),
                 spec.input_dim, spec.embed_dim);
            for (std::size_t bi = 0; bi < l.k.size(); ++bi) {
                const int w = spec.conv_widths[bi];
                draw(l.k[bi], l.kb[bi] - l.k[bi], w * spec.embed_dim,
                     l.filters);
            }
            draw(l.head_w, l.head_b - l.head_w, static_cast<int>(l.concat),
                 spec.num_classes);
            break;
        }
        case ModelKind::lstm: {
            const auto l = lstm_layout(spec);
            draw(l.embed, static_cast<std::size_t>(spec.input_dim) *
                              static_cast<std::size_t>(spec.embed_dim),
                 spec.input_dim, spec.embed_dim);
            draw(l.wx, l.wh - l.wx, spec.embed_dim, 4 * l.hidden);
            draw(l.wh, l.b - l.wh, l.hidden, 4 * l.hidden);
            draw(l.head_w, l.head_b - l.head_w, l.hidden, spec.num_classes);
            break;
        }
    }
    ensure_finite(out, "init_params");
    return out;
}

ForwardResult forward(const ModelSpec& spec, const ParameterVector& params,
                      const Batch& batch) {
    ForwardResult r;
    r.probs = Matrix(batch.size(), static_cast<std::size_t>(spec.num_classes));
    r.loss = dispatch(spec, params, batch, &r.probs, nullptr);
    return r;
}

GradResult loss_and_gradient(const ModelSpec& spec,
                             const ParameterVector& params,
                             const Batch& batch) {
    GradResult r;
    r.loss = dispatch(spec, params, batch, nullptr, &r.gradient);
    ensure_finite(r.gradient, "backward");
    return r;
}

ParameterVector backward(const ModelSpec& spec, const ParameterVector& params,
                         const Batch& batch) {
    return loss_and_gradient(spec, params, batch).gradient;
}

ParameterVector sgd_step(const ParameterVector& params,
                         const ParameterVector& gradient, double lr) {
    require_same_length(params, gradient, "sgd_step");
    ParameterVector out(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        out[i] = params[i] - lr * gradient[i];
    }
    ensure_finite(out, "sgd_step");
    return out;
}

}  // namespace fedsim
