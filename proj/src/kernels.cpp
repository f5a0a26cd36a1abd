#include "fatra/kernels.hpp"

#include <cmath>

#ifdef FATRA_OPENMP
#include <omp.h>
#endif

namespace fatra::kern {

namespace {

inline void matmul_row(const double* A, const double* B, double* C,
                       std::size_t i, std::size_t k, std::size_t c, bool accumulate) {
    double* crow = C + i * c;
    if (!accumulate) {
        for (std::size_t j = 0; j < c; ++j) crow[j] = 0.0;
    }
    const double* arow = A + i * k;
    for (std::size_t kk = 0; kk < k; ++kk) {
        const double a = arow[kk];
        const double* brow = B + kk * c;
        for (std::size_t j = 0; j < c; ++j) crow[j] += a * brow[j];
    }
}

inline void matmul_ta_row(const double* A, const double* B, double* C,
                          std::size_t i, std::size_t r, std::size_t k, std::size_t c,
                          bool accumulate) {
    double* crow = C + i * c;
    if (!accumulate) {
        for (std::size_t j = 0; j < c; ++j) crow[j] = 0.0;
    }
    for (std::size_t kk = 0; kk < k; ++kk) {
        const double a = A[kk * r + i];
        const double* brow = B + kk * c;
        for (std::size_t j = 0; j < c; ++j) crow[j] += a * brow[j];
    }
}

inline void matmul_tb_row(const double* A, const double* B, double* C,
                          std::size_t i, std::size_t k, std::size_t c, bool accumulate) {
    const double* arow = A + i * k;
    double* crow = C + i * c;
    for (std::size_t j = 0; j < c; ++j) {
        const double* brow = B + j * k;
        double acc = 0.0;
        for (std::size_t kk = 0; kk < k; ++kk) acc += arow[kk] * brow[kk];
        crow[j] = accumulate ? crow[j] + acc : acc;
    }
}

inline double sigmoid1(double v) {
    // split on sign to avoid exp overflow
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
}

}  // namespace

namespace serial {

void matmul(const double* A, const double* B, double* C,
            std::size_t r, std::size_t k, std::size_t c, bool accumulate) {
    for (std::size_t i = 0; i < r; ++i) matmul_row(A, B, C, i, k, c, accumulate);
}

void matmul_ta(const double* A, const double* B, double* C,
               std::size_t r, std::size_t k, std::size_t c, bool accumulate) {
    for (std::size_t i = 0; i < r; ++i) matmul_ta_row(A, B, C, i, r, k, c, accumulate);
}

void matmul_tb(const double* A, const double* B, double* C,
               std::size_t r, std::size_t k, std::size_t c, bool accumulate) {
    for (std::size_t i = 0; i < r; ++i) matmul_tb_row(A, B, C, i, k, c, accumulate);
}

void relu(const double* x, double* y, std::size_t rows, std::size_t cols) {
    const std::size_t n = rows * cols;
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void sigmoid(const double* x, double* y, std::size_t rows, std::size_t cols) {
    const std::size_t n = rows * cols;
    for (std::size_t i = 0; i < n; ++i) y[i] = sigmoid1(x[i]);
}

void row_sumsq(const double* x, double* out, std::size_t rows, std::size_t cols) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = x + i * cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) acc += row[j] * row[j];
        out[i] = acc;
    }
}

}  // namespace serial

namespace omp {

void matmul(const double* A, const double* B, double* C,
            std::size_t r, std::size_t k, std::size_t c, bool accumulate) {
#ifdef FATRA_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(r); ++i)
        matmul_row(A, B, C, static_cast<std::size_t>(i), k, c, accumulate);
}

void matmul_ta(const double* A, const double* B, double* C,
               std::size_t r, std::size_t k, std::size_t c, bool accumulate) {
#ifdef FATRA_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(r); ++i)
        matmul_ta_row(A, B, C, static_cast<std::size_t>(i), r, k, c, accumulate);
}

void matmul_tb(const double* A, const double* B, double* C,
               std::size_t r, std::size_t k, std::size_t c, bool accumulate) {
#ifdef FATRA_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(r); ++i)
        matmul_tb_row(A, B, C, static_cast<std::size_t>(i), k, c, accumulate);
}

void relu(const double* x, double* y, std::size_t rows, std::size_t cols) {
#ifdef FATRA_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows); ++i) {
        const double* xr = x + static_cast<std::size_t>(i) * cols;
        double* yr = y + static_cast<std::size_t>(i) * cols;
        for (std::size_t j = 0; j < cols; ++j) yr[j] = xr[j] > 0.0 ? xr[j] : 0.0;
    }
}

void sigmoid(const double* x, double* y, std::size_t rows, std::size_t cols) {
#ifdef FATRA_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows); ++i) {
        const double* xr = x + static_cast<std::size_t>(i) * cols;
        double* yr = y + static_cast<std::size_t>(i) * cols;
        for (std::size_t j = 0; j < cols; ++j) yr[j] = sigmoid1(xr[j]);
    }
}

void row_sumsq(const double* x, double* out, std::size_t rows, std::size_t cols) {
#ifdef FATRA_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows); ++i) {
        const double* row = x + static_cast<std::size_t>(i) * cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) acc += row[j] * row[j];
        out[i] = acc;
    }
}

}  // namespace omp

// Small matrices are not worth a parallel region.
static constexpr std::size_t kParallelCutoff = 1u << 14;

void matmul(const double* A, const double* B, double* C,
            std::size_t r, std::size_t k, std::size_t c, bool accumulate) {
    if (r * k * c >= kParallelCutoff) omp::matmul(A, B, C, r, k, c, accumulate);
    else serial::matmul(A, B, C, r, k, c, accumulate);
}

void matmul_ta(const double* A, const double* B, double* C,
               std::size_t r, std::size_t k, std::size_t c, bool accumulate) {
    if (r * k * c >= kParallelCutoff) omp::matmul_ta(A, B, C, r, k, c, accumulate);
    else serial::matmul_ta(A, B, C, r, k, c, accumulate);
}

void matmul_tb(const double* A, const double* B, double* C,
               std::size_t r, std::size_t k, std::size_t c, bool accumulate) {
    if (r * k * c >= kParallelCutoff) omp::matmul_tb(A, B, C, r, k, c, accumulate);
    else serial::matmul_tb(A, B, C, r, k, c, accumulate);
}

void relu(const double* x, double* y, std::size_t rows, std::size_t cols) {
    if (rows * cols >= kParallelCutoff) omp::relu(x, y, rows, cols);
    else serial::relu(x, y, rows, cols);
}

void sigmoid(const double* x, double* y, std::size_t rows, std::size_t cols) {
    if (rows * cols >= kParallelCutoff) omp::sigmoid(x, y, rows, cols);
    else serial::sigmoid(x, y, rows, cols);
}

void row_sumsq(const double* x, double* out, std::size_t rows, std::size_t cols) {
    if (rows * cols >= kParallelCutoff) omp::row_sumsq(x, out, rows, cols);
    else serial::row_sumsq(x, out, rows, cols);
}

}  // namespace fatra::kern
