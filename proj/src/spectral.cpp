#include "fatra/spectral.hpp"

#include <cmath>
#include <vector>

#include "fatra/kernels.hpp"

namespace fatra {

namespace {

// Power iteration on W^T W from a given start; returns -1 when the start
// lies in the null space.
double power_from(const Matrix& W, std::vector<double> v,
                  std::size_t max_iters, double tol) {
    const std::size_t r = W.rows();
    const std::size_t c = W.cols();
    std::vector<double> wv(r, 0.0);
    std::vector<double> wtwv(c, 0.0);
    double sigma = 0.0;
    for (std::size_t it = 0; it < max_iters; ++it) {
        kern::matmul(W.data(), v.data(), wv.data(), r, c, 1);
        kern::matmul_ta(W.data(), wv.data(), wtwv.data(), c, r, 1);
        double nrm = 0.0;
        for (double x : wtwv) nrm += x * x;
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) return it == 0 ? -1.0 : sigma;
        for (std::size_t j = 0; j < c; ++j) v[j] = wtwv[j] / nrm;
        double s = 0.0;
        kern::matmul(W.data(), v.data(), wv.data(), r, c, 1);
        for (double x : wv) s += x * x;
        s = std::sqrt(s);
        if (std::fabs(s - sigma) <= tol) return s;
        sigma = s;
    }
    return sigma;
}

}  // namespace

double spectral_norm(const Matrix& W, std::size_t max_iters, double tol) {
    if (W.empty()) throw ContractError("spectral_norm: empty matrix");
    if (max_iters < 1) throw ContractError("spectral_norm: max_iters must be >= 1");
    if (!(tol > 0.0)) throw ContractError("spectral_norm: tol must be > 0");

    const std::size_t c = W.cols();
    std::vector<double> start(c, 1.0 / std::sqrt(static_cast<double>(c)));
    double s = power_from(W, start, max_iters, tol);
    // the all-ones start can sit in the null space of a nonzero W; fall back
    // to basis vectors, which jointly span the domain
    for (std::size_t j = 0; s < 0.0 && j < c; ++j) {
        std::vector<double> e(c, 0.0);
        e[j] = 1.0;
        s = power_from(W, e, max_iters, tol);
    }
    return s < 0.0 ? 0.0 : s;
}

}  // namespace fatra
