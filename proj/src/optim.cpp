#include "rsip/optim.hpp"

#include <cmath>

#include "rsip/errors.hpp"
#include "rsip/kernels.hpp"

namespace rsip {

AdamState AdamState::zeros(std::size_t n, double lr) {
    AdamState s;
    s.m.assign(n, 0.0);
    s.v.assign(n, 0.0);
    s.lr = lr;
    return s;
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad) {
    if (params.size() != grad.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
        throw InvalidArgument("adam: parameter, gradient and state lengths differ");
    }
    for (double g : grad) {
        if (!std::isfinite(g)) throw NumericalError("adam: non-finite gradient");
    }
    state.step_count += 1;
    const auto t = static_cast<double>(state.step_count);
    kernels::AdamStepCoefficients c{};
    c.beta1 = state.beta1;
    c.beta2 = state.beta2;
    c.step_size = state.lr / (1.0 - std::pow(state.beta1, t));
    c.inv_bias2 = 1.0 / (1.0 - std::pow(state.beta2, t));
    c.eps = state.eps_hat;
    kernels::parallel::adam_update(params, grad, state.m, state.v, c);
}

}  // namespace rsip
