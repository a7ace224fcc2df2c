#pragma once

#include "genboot/nn/params.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace genboot::nn {

struct AdamConfig {
    double beta1 = 0.5;
    double beta2 = 0.9;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamConfig config;
    std::vector<Array> m;
    std::vector<Array> v;
    std::uint64_t step = 0;
};

class NonFiniteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Zero moments shaped like `params`.
AdamState adam_init(const NetworkParams& params, const AdamConfig& config = {});

/// One bias-corrected Adam update. `grads` is aligned with the blocks of
/// `params`. Throws NonFiniteError naming the first block with a NaN or
/// infinite gradient; nothing is modified in that case.
void adam_step(NetworkParams& params, std::span<const Array> grads, AdamState& state, double lr);

}  // namespace genboot::nn
