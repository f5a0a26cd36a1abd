#pragma once

#include <cstdint>

#include "fatra/matrix.hpp"

namespace fatra {

// Bias-corrected first-order adaptive optimizer state for one parameter.
struct AdamState {
    Matrix m;  // first moment
    Matrix v;  // second moment
    std::uint64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    AdamState() = default;
    AdamState(std::size_t rows, std::size_t cols) : m(rows, cols), v(rows, cols) {}
};

// In-place update of param; increments state.step.
void adam_step(Matrix& param, const Matrix& grad, AdamState& state, double lr);

}  // namespace fatra
