#include "fedsim/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "fedsim/errors.hpp"

namespace fedsim {

double accuracy(const std::vector<std::int32_t>& predictions,
                const std::vector<std::int32_t>& labels) {
    if (predictions.empty() || predictions.size() != labels.size()) {
        throw ShapeError("accuracy: need equal nonempty prediction/label lists");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (predictions[i] == labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double auroc(const std::vector<double>& scores,
             const std::vector<std::int32_t>& labels) {
    if (scores.empty() || scores.size() != labels.size()) {
        throw ShapeError("auroc: need equal nonempty score/label lists");
    }
    std::int64_t n_pos = 0;
    for (std::int32_t y : labels) {
        if (y != 0 && y != 1) {
            throw ConfigError("auroc: labels must be 0 or 1, got " +
                              std::to_string(y));
        }
        n_pos += y;
    }
    const auto n = static_cast<std::int64_t>(labels.size());
    const std::int64_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw MetricError("auroc undefined: only one class present");
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] < scores[b];
    });

    // Twice the midrank stays integral, so the sort-based value matches the
    // pairwise count exactly, ties included.
    std::int64_t pos_rank2_sum = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) {
            ++j;
        }
        const auto rank2 = static_cast<std::int64_t>(i + j) + 2;  // 1-based
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]] == 1) pos_rank2_sum += rank2;
        }
        i = j + 1;
    }
    const std::int64_t u2 = pos_rank2_sum - n_pos * (n_pos + 1);
    return static_cast<double>(u2) / (2.0 * static_cast<double>(n_pos) *
                                      static_cast<double>(n_neg));
}

}  // namespace fedsim
