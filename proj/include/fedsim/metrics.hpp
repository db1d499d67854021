#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace fedsim {

// Fraction of exact matches.
double accuracy(const std::vector<std::int32_t>& predictions,
                const std::vector<std::int32_t>& labels);

// Mann-Whitney AUROC with the half-credit tie convention, computed via a
// single sort with midranks. Throws MetricError when only one class is
// present (the metric is undefined, not zero).
double auroc(const std::vector<double>& scores,
             const std::vector<std::int32_t>& labels);

struct EvalReport {
    double accuracy = 0.0;
    std::optional<double> auroc;  // binary tasks with both classes present
    std::size_t n_examples = 0;
};

}  // namespace fedsim
