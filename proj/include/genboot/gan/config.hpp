#pragma once

#include "genboot/nn/adam.hpp"
#include "genboot/nn/params.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace genboot::gan {

enum class Objective { WganGp, BasicGan };

std::string objective_name(Objective objective);
Objective parse_objective(const std::string& name);

struct GeneratorArch {
    std::vector<std::size_t> filters{128, 64, 32, 32, 16, 1};
    std::vector<std::size_t> dilations{1, 2, 4, 8, 16, 32};
    std::size_t kernel_size = 2;
    std::size_t noise_dim = 256;
};

struct DiscriminatorArch {
    std::vector<std::size_t> filters{8, 16, 32, 32, 64, 64};
    std::vector<std::size_t> dilations{1, 2, 4, 8, 16, 32};
    std::size_t kernel_size = 2;
    std::vector<std::size_t> pool_taps{1, 2, 6};  // 1-based conv layer indices
    std::size_t pool_bins = 16;
    std::size_t hidden = 4096;
    double leaky_slope = 0.01;
};

struct Hyper {
    double lr_d = 0.00025;
    double lr_g = 0.00025;
    double lambda = 20.0;
    std::size_t batch_size = 64;
    std::size_t n_init = 50;
    std::size_t n_discriminator = 5;
    std::size_t n_generator = 1;
    std::size_t total_steps = 5000;
    nn::AdamConfig adam{};
    nn::InitSpec init{};
};

struct GanConfig {
    GeneratorArch generator;
    DiscriminatorArch discriminator;
    Hyper hyper;
    Objective objective = Objective::WganGp;

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
};

/// Extra past rows one output step depends on: sum of (kernel - 1) * dilation.
std::size_t receptive_field(std::span<const std::size_t> dilations, std::size_t kernel_size);

}  // namespace genboot::gan
