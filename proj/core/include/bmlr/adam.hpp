#pragma once

#include <cstdint>
#include <span>

#include "bmlr/dense_matrix.hpp"

namespace bmlr {

/// Bias-corrected Adam state for one parameter group. Moment vectors match
/// the group's flattened parameter dimensionality.
struct AdamState {
    AdamState(std::size_t dim, double lr);

    Vector m;  // first moment
    Vector v;  // second moment
    std::int64_t step = 0;
    double lr;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// One Adam update over a flattened parameter group, in place. Pure function
/// of (params, grads, state): identical inputs give bit-identical outputs.
/// Non-finite gradients abort with a diagnostic.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

}  // namespace bmlr
