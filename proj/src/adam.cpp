#include "fatra/adam.hpp"

#include <cmath>

namespace fatra {

void adam_step(Matrix& param, const Matrix& grad, AdamState& state, double lr) {
    if (!param.same_shape(grad))
        throw DimensionError("adam_step: param " + param.shape_str() + " vs grad " +
                             grad.shape_str());
    if (!param.same_shape(state.m) || !param.same_shape(state.v))
        throw DimensionError("adam_step: state accumulators " + state.m.shape_str() +
                             " do not match param " + param.shape_str());
    if (!(lr > 0.0)) throw ContractError("adam_step: lr must be > 0");

    state.step += 1;
    const double b1 = state.beta1;
    const double b2 = state.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < param.size(); ++i) {
        const double g = grad.data()[i];
        double& m = state.m.data()[i];
        double& v = state.v.data()[i];
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g * g;
        const double mhat = m / c1;
        const double vhat = v / c2;
        param.data()[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
    param.assert_finite("adam_step");
}

}  // namespace fatra
