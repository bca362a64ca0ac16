#include "bmlr/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bmlr {

AdamState::AdamState(std::size_t dim, double lr_) : m(dim, 0.0), v(dim, 0.0), lr(lr_) {
    if (!(lr > 0.0)) {
        throw std::invalid_argument("AdamState: learning rate must be positive");
    }
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw std::invalid_argument("adam_step: dimension mismatch (params " +
                                    std::to_string(params.size()) + ", grads " +
                                    std::to_string(grads.size()) + ", state " +
                                    std::to_string(state.m.size()) + ")");
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (!std::isfinite(grads[i])) {
            throw std::runtime_error("adam_step: non-finite gradient at index " +
                                     std::to_string(i));
        }
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

}  // namespace bmlr
