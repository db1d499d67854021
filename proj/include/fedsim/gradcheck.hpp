#pragma once

#include <cstdint>

#include "fedsim/model.hpp"

namespace fedsim {

// Central finite differences of the forward loss, (L(p+h) - L(p-h)) / 2h per
// coordinate. Shares no code with backward().
ParameterVector finite_difference_gradient(const ModelSpec& spec,
                                           const ParameterVector& params,
                                           const Batch& batch, double h);

struct GradCheckResult {
    double max_rel_err = 0.0;
    bool pass = false;
};

// Relative error per coordinate is |g - fd| / max(|g| + |fd|, 1e-6).
GradCheckResult gradient_check(const ModelSpec& spec,
                               const ParameterVector& params,
                               const Batch& batch, double h = 1e-5,
                               double tol = 1e-4);

// Small fixed architectures used by the gradcheck command and tests.
ModelSpec gradcheck_spec(ModelKind kind, std::uint64_t seed);

// Random inputs/labels matching the spec's encoding.
Batch random_batch(const ModelSpec& spec, std::size_t n, std::uint64_t seed,
                   std::size_t seq_len = 8);

}  // namespace fedsim
