#pragma once

// Layers as graph builders. Activations are (batch, time, channels) for the
// convolutional part and (batch, features) for dense layers.

#include "genboot/nn/params.hpp"

#include <string>
#include <vector>

namespace genboot::nn {

struct ConvLayerSpec {
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    std::size_t kernel_size = 2;
    std::size_t dilation = 1;
    bool has_bias = true;

    void validate() const;
};

struct DenseSpec {
    std::size_t in_features = 1;
    std::size_t out_features = 1;
    bool has_bias = true;
};

enum class Activation { Linear, Tanh, LeakyRelu };

/// `<prefix>.w` of shape (kernel, in, out) and, with bias, `<prefix>.b` of shape (out).
std::vector<ParamSpec> conv_params(const std::string& prefix, const ConvLayerSpec& spec);
/// `<prefix>.w` of shape (in, out) and, with bias, `<prefix>.b` of shape (out).
std::vector<ParamSpec> dense_params(const std::string& prefix, const DenseSpec& spec);

/// Causal dilated convolution with left zero padding: output length equals input
/// length and output[t] depends on input[t - k * dilation], k = 0 .. kernel-1.
/// Pass an empty `bias` for a bias-free layer.
Expr causal_dilated_conv(const Expr& x, const ConvLayerSpec& spec, const Expr& weights, const Expr& bias);

/// x (batch, in) @ weights (in, out) + bias.
Expr dense(const Expr& x, const Expr& weights, const Expr& bias);

/// Max over `bins` contiguous near-equal segments of every row of (rows, length).
Expr adaptive_max_pool(const Expr& features, std::size_t bins);

Expr activate(const Expr& x, Activation activation, double leaky_slope = 0.01);

}  // namespace genboot::nn
