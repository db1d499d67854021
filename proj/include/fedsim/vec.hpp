#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fedsim/errors.hpp"

namespace fedsim {

// Flat ordered weight vector of one model. Layout is fixed by the owning
// ModelSpec (see model.hpp) and never changes across training.
using ParameterVector = std::vector<double>;

inline void require_same_length(const ParameterVector& x,
                                const ParameterVector& y, const char* what) {
    if (x.size() != y.size()) {
        throw ShapeError(std::string(what) + ": length mismatch (" +
                         std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
    }
}

inline void ensure_finite(const ParameterVector& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw NumericError(std::string(what) + ": non-finite entry");
        }
    }
}

// a*x + y
inline ParameterVector vec_axpy(double a, const ParameterVector& x,
                                const ParameterVector& y) {
    require_same_length(x, y, "vec_axpy");
    ParameterVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + y[i];
    return out;
}

inline ParameterVector vec_sub(const ParameterVector& x,
                               const ParameterVector& y) {
    require_same_length(x, y, "vec_sub");
    ParameterVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
    return out;
}

inline ParameterVector vec_scale(double a, const ParameterVector& x) {
    ParameterVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i];
    return out;
}

// Mean of a set of equal-length vectors. Summation runs in input order, so
// callers must pass client vectors in ascending client-id order to keep
// results bit-identical regardless of how the inputs were produced.
inline ParameterVector vec_mean(const std::vector<ParameterVector>& vs) {
    if (vs.empty()) throw ConfigError("vec_mean: empty input set");
    ParameterVector acc(vs.front().size(), 0.0);
    for (const auto& v : vs) {
        require_same_length(acc, v, "vec_mean");
        for (std::size_t i = 0; i < v.size(); ++i) acc[i] += v[i];
    }
    const double inv = 1.0 / static_cast<double>(vs.size());
    for (double& x : acc) x *= inv;
    return acc;
}

inline double vec_norm(const ParameterVector& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

}  // namespace fedsim
