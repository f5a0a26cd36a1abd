#pragma once

#include "fatra/matrix.hpp"

namespace fatra {

// Largest singular value by power iteration on W^T W. Deterministic: the
// start vector is the normalized all-ones vector. All-zero W returns 0.
double spectral_norm(const Matrix& W, std::size_t max_iters = 200, double tol = 1e-9);

}  // namespace fatra
