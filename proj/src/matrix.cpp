#include "fatra/matrix.hpp"

#include <cmath>

#include "fatra/kernels.hpp"

namespace fatra {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c)
            throw DimensionError("from_rows: ragged row " + std::to_string(i));
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

std::string Matrix::shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

void Matrix::assert_finite(const char* where) const {
    for (double v : data_) {
        if (!std::isfinite(v))
            throw NumericError(std::string(where) + ": non-finite entry");
    }
}

double frobenius_norm(const Matrix& m) {
    if (m.empty()) return 0.0;
    std::vector<double> partial(m.rows());
    kern::row_sumsq(m.data(), partial.data(), m.rows(), m.cols());
    double acc = 0.0;
    for (double p : partial) acc += p;
    return std::sqrt(acc);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b))
        throw DimensionError("max_abs_diff: " + a.shape_str() + " vs " + b.shape_str());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::fabs(a.data()[i] - b.data()[i]);
        if (d > m) m = d;
    }
    return m;
}

}  // namespace fatra
