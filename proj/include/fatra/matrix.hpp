#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fatra/error.hpp"

namespace fatra {

// Dense 64-bit real matrix, row-major. Exposed operations keep every entry
// finite; assert_finite enforces the invariant where new values appear.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    std::string shape_str() const;

    void fill(double v) { for (double& x : data_) x = v; }

    void assert_finite(const char* where) const;

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Frobenius norm, computed with per-row partials summed in row order.
double frobenius_norm(const Matrix& m);

// Max |a - b| over entries; shapes must match.
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace fatra
