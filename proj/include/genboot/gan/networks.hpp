#pragma once

// Temporal-convolution generator and discriminator.
//
// Generator: noise (batch, b + p, noise_dim) -> conv stack (tanh between
// layers, linear last layer) -> last b steps of the single output channel.
//
// Discriminator: path (batch, T) as a 1-channel sequence -> conv stack with
// leaky ReLU. The activations of the tapped layers are flattened channel-major
// (c * T + t) and max-pooled to pool_bins values each; the concatenation goes
// through dense(hidden) + leaky ReLU and dense(1) with no output activation.

#include "genboot/gan/config.hpp"
#include "genboot/nn/layers.hpp"
#include "genboot/nn/params.hpp"

namespace genboot::gan {

using nn::Array;
using nn::Expr;

class Generator {
public:
    explicit Generator(GeneratorArch arch);

    const GeneratorArch& arch() const noexcept { return arch_; }
    const nn::ParamLeaves& params() const noexcept { return params_; }
    std::size_t receptive_field() const noexcept { return p_; }

    /// (batch, b + p, noise_dim) -> (batch, b).
    Expr build(const Expr& noise) const;

private:
    GeneratorArch arch_;
    std::vector<nn::ConvLayerSpec> layers_;
    nn::ParamLeaves params_;
    std::size_t p_;
};

class Discriminator {
public:
    explicit Discriminator(DiscriminatorArch arch);

    const DiscriminatorArch& arch() const noexcept { return arch_; }
    const nn::ParamLeaves& params() const noexcept { return params_; }

    /// Shortest path the pooling taps accept.
    std::size_t min_length() const noexcept;

    /// (batch, T) -> (batch) scores.
    Expr build(const Expr& paths) const;

private:
    DiscriminatorArch arch_;
    std::vector<nn::ConvLayerSpec> layers_;
    nn::ParamLeaves params_;
};

/// noise (b + p, noise_dim) -> path (b), or batched (n, b + p, noise_dim) -> (n, b).
Array generate(const Generator& generator, const nn::NetworkParams& params, const Array& noise);

/// path (T) -> scalar score, or batched (n, T) -> (n).
Array discriminate(const Discriminator& discriminator, const nn::NetworkParams& params, const Array& paths);

}  // namespace genboot::gan
