#pragma once

// Randomised small GAN problems for gradient checks. Each problem draws its
// own architecture (depths, widths, kernels including 1, dilations, pooling
// taps), batch, block length and parameter values, then exposes the WGAN-GP
// and basic-GAN losses for finite-difference comparison.

#include "genboot/gan/losses.hpp"
#include "genboot/tensor/evaluate.hpp"
#include "support/fd_oracle.hpp"

#include <algorithm>
#include <set>

namespace genboot::testing {

inline gan::GanConfig toy_config(Rng& rng) {
    gan::GanConfig c;
    auto pick = [&](std::size_t lo, std::size_t hi) { return lo + uniform_index(rng, hi - lo + 1); };

    const std::size_t g_depth = pick(1, 3);
    c.generator.filters.clear();
    c.generator.dilations.clear();
    for (std::size_t i = 0; i < g_depth; ++i) {
        c.generator.filters.push_back(i + 1 == g_depth ? 1 : pick(1, 3));
        c.generator.dilations.push_back(pick(1, 3));
    }
    c.generator.kernel_size = pick(1, 3);
    c.generator.noise_dim = pick(1, 3);

    const std::size_t d_depth = pick(1, 3);
    c.discriminator.filters.clear();
    c.discriminator.dilations.clear();
    for (std::size_t i = 0; i < d_depth; ++i) {
        c.discriminator.filters.push_back(pick(1, 3));
        c.discriminator.dilations.push_back(pick(1, 3));
    }
    c.discriminator.kernel_size = pick(1, 3);
    c.discriminator.pool_taps.clear();
    for (std::size_t i = 1; i <= d_depth; ++i) {
        if (uniform01(rng) < 0.6) c.discriminator.pool_taps.push_back(i);
    }
    if (c.discriminator.pool_taps.empty()) c.discriminator.pool_taps.push_back(d_depth);
    c.discriminator.pool_bins = pick(1, 4);
    c.discriminator.hidden = pick(1, 4);
    c.discriminator.leaky_slope = uniform01(rng) < 0.5 ? 0.01 : 0.2;
    c.hyper.batch_size = pick(1, 3);
    c.hyper.lambda = 1.0 + 10.0 * uniform01(rng);
    c.validate();
    return c;
}

inline tensor::Array random_array(const tensor::Shape& shape, Rng& rng, double scale = 1.0) {
    tensor::Array a(shape);
    fill_standard_normal(rng, a.values());
    for (auto& v : a.values()) v *= scale;
    return a;
}

struct ToyProblem {
    gan::GanConfig config;
    gan::Generator gen;
    gan::Discriminator disc;
    std::size_t block_length;
    tensor::Expr real;
    tensor::Expr fake;
    tensor::Expr interp;
    tensor::Expr noise;
    LeafValues values;

    explicit ToyProblem(Rng& rng)
        : config(toy_config(rng)), gen(config.generator), disc(config.discriminator), block_length(0) {
        block_length = std::max<std::size_t>(disc.min_length(), 2) + uniform_index(rng, 5);
        const std::size_t nb = config.hyper.batch_size;
        real = tensor::leaf("real", {nb, block_length});
        fake = tensor::leaf("fake", {nb, block_length});
        interp = tensor::leaf("interp", {nb, block_length});
        noise = tensor::leaf("noise", {nb, block_length + gen.receptive_field(), config.generator.noise_dim});
        // Weights well above the training init scale so every nonlinearity is exercised.
        for (const auto* leaves : {&gen.params(), &disc.params()}) {
            for (const auto& spec : leaves->specs()) values[spec.name] = random_array(spec.shape, rng, 0.7);
        }
        values["real"] = random_array(real.shape(), rng);
        values["fake"] = random_array(fake.shape(), rng);
        values["interp"] = random_array(interp.shape(), rng);
        values["noise"] = random_array(noise.shape(), rng);
    }

    gan::WganDiscriminatorLoss d1() const {
        return gan::wgan_discriminator_loss(disc, real, fake, interp, config.hyper.lambda);
    }
    tensor::Expr g1() const { return gan::wgan_generator_loss(gen, disc, noise); }
    gan::BasicGanLosses basic() const { return gan::basic_gan_losses(disc, gen, real, noise); }
};

/// Op kinds that appear in the graphs of the given roots.
inline std::set<tensor::OpKind> op_kinds(std::span<const tensor::Expr> roots) {
    std::set<tensor::OpKind> kinds;
    for (const tensor::Node* n : tensor::topological_order(roots)) kinds.insert(n->kind());
    return kinds;
}

}  // namespace genboot::testing
