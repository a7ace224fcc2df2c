#include "genboot/nn/adam.hpp"

#include <cmath>

namespace genboot::nn {

AdamState adam_init(const NetworkParams& params, const AdamConfig& config) {
    AdamState state;
    state.config = config;
    for (std::size_t i = 0; i < params.block_count(); ++i) {
        state.m.emplace_back(params.value(i).shape());
        state.v.emplace_back(params.value(i).shape());
    }
    return state;
}

void adam_step(NetworkParams& params, std::span<const Array> grads, AdamState& state, double lr) {
    const std::size_t blocks = params.block_count();
    if (grads.size() != blocks || state.m.size() != blocks || state.v.size() != blocks) {
        throw std::invalid_argument("adam_step: expected " + std::to_string(blocks) + " gradient blocks, got " +
                                    std::to_string(grads.size()));
    }
    for (std::size_t i = 0; i < blocks; ++i) {
        if (grads[i].shape() != params.value(i).shape() || state.m[i].shape() != params.value(i).shape()) {
            throw tensor::ShapeError("adam_step: shape mismatch in block '" + params.name(i) + "'");
        }
        const std::size_t bad = grads[i].first_non_finite();
        if (bad != grads[i].size()) {
            throw NonFiniteError("adam_step: non-finite gradient in block '" + params.name(i) + "' at element " +
                                 std::to_string(bad));
        }
    }

    const auto& c = state.config;
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(c.beta1, t);
    const double correction2 = 1.0 - std::pow(c.beta2, t);
    for (std::size_t i = 0; i < blocks; ++i) {
        auto theta = params.value(i).values();
        auto m = state.m[i].values();
        auto v = state.v[i].values();
        auto g = grads[i].values();
        for (std::size_t k = 0; k < theta.size(); ++k) {
            m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * g[k];
            v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * g[k] * g[k];
            const double m_hat = m[k] / correction1;
            const double v_hat = v[k] / correction2;
            theta[k] -= lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
        }
    }
}

}  // namespace genboot::nn
