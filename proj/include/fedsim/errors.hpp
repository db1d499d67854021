#pragma once

#include <stdexcept>
#include <string>

namespace fedsim {

// Invalid configuration values (bad dimensions, rates, missing fields).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mismatched vector/matrix dimensions between arguments.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input data (bad JSONL lines, bad config files).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Metric is undefined for the given inputs (e.g. AUROC with one class).
struct MetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite value produced where the contract requires finite output.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fedsim
