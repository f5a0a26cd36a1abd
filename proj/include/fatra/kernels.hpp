#pragma once

#include <cstddef>

// Dense double-precision kernels. Every kernel has a serial reference
// implementation under kern::serial and an OpenMP version under kern::omp
// that partitions work by output row. Per-element accumulation order is
// identical in both, so results are bit-identical regardless of thread
// count; tests compare the two paths exactly. The unqualified entry points
// dispatch to the OpenMP path when compiled with it.

namespace fatra::kern {

namespace serial {

// C(r x c) = A(r x k) * B(k x c); accumulate adds into C instead of overwriting.
void matmul(const double* A, const double* B, double* C,
            std::size_t r, std::size_t k, std::size_t c, bool accumulate = false);

// C(r x c) = A^T * B with A stored (k x r), B (k x c).
void matmul_ta(const double* A, const double* B, double* C,
               std::size_t r, std::size_t k, std::size_t c, bool accumulate = false);

// C(r x c) = A * B^T with A stored (r x k), B (c x k).
void matmul_tb(const double* A, const double* B, double* C,
               std::size_t r, std::size_t k, std::size_t c, bool accumulate = false);

// Row-parallel elementwise kernels; `rows` x `cols` row-major buffers.
void relu(const double* x, double* y, std::size_t rows, std::size_t cols);
void sigmoid(const double* x, double* y, std::size_t rows, std::size_t cols);

// out[i] = sum_j x[i,j] * x[i,j]  (one partial per row; callers reduce serially)
void row_sumsq(const double* x, double* out, std::size_t rows, std::size_t cols);

}  // namespace serial

namespace omp {

void matmul(const double* A, const double* B, double* C,
            std::size_t r, std::size_t k, std::size_t c, bool accumulate = false);
void matmul_ta(const double* A, const double* B, double* C,
               std::size_t r, std::size_t k, std::size_t c, bool accumulate = false);
void matmul_tb(const double* A, const double* B, double* C,
               std::size_t r, std::size_t k, std::size_t c, bool accumulate = false);
void relu(const double* x, double* y, std::size_t rows, std::size_t cols);
void sigmoid(const double* x, double* y, std::size_t rows, std::size_t cols);
void row_sumsq(const double* x, double* out, std::size_t rows, std::size_t cols);

}  // namespace omp

// Dispatching entry points used by the rest of the library.
void matmul(const double* A, const double* B, double* C,
            std::size_t r, std::size_t k, std::size_t c, bool accumulate = false);
void matmul_ta(const double* A, const double* B, double* C,
               std::size_t r, std::size_t k, std::size_t c, bool accumulate = false);
void matmul_tb(const double* A, const double* B, double* C,
               std::size_t r, std::size_t k, std::size_t c, bool accumulate = false);
void relu(const double* x, double* y, std::size_t rows, std::size_t cols);
void sigmoid(const double* x, double* y, std::size_t rows, std::size_t cols);
void row_sumsq(const double* x, double* out, std::size_t rows, std::size_t cols);

}  // namespace fatra::kern
