#include "genboot/nn/layers.hpp"

#include <stdexcept>

namespace genboot::nn {

void ConvLayerSpec::validate() const {
    if (in_channels == 0 || out_channels == 0) throw std::invalid_argument("conv layer: channel counts must be positive");
    if (kernel_size == 0) throw std::invalid_argument("conv layer: kernel_size must be at least 1");
    if (dilation == 0) throw std::invalid_argument("conv layer: dilation must be at least 1");
}

std::vector<ParamSpec> conv_params(const std::string& prefix, const ConvLayerSpec& spec) {
    spec.validate();
    std::vector<ParamSpec> out{{prefix + ".w", {spec.kernel_size, spec.in_channels, spec.out_channels}, false}};
    if (spec.has_bias) out.push_back({prefix + ".b", {spec.out_channels}, true});
    return out;
}

std::vector<ParamSpec> dense_params(const std::string& prefix, const DenseSpec& spec) {
    std::vector<ParamSpec> out{{prefix + ".w", {spec.in_features, spec.out_features}, false}};
    if (spec.has_bias) out.push_back({prefix + ".b", {spec.out_features}, true});
    return out;
}

Expr causal_dilated_conv(const Expr& x, const ConvLayerSpec& spec, const Expr& weights, const Expr& bias) {
    spec.validate();
    const Shape expected{spec.kernel_size, spec.in_channels, spec.out_channels};
    if (weights.shape() != expected) {
        throw tensor::ShapeError("conv layer: weights " + tensor::shape_string(weights.shape()) + ", expected " +
                                 tensor::shape_string(expected));
    }
    if (x.shape().size() != 3 || x.shape()[2] != spec.in_channels) {
        throw tensor::ShapeError("conv layer: input " + tensor::shape_string(x.shape()) + " does not have " +
                                 std::to_string(spec.in_channels) + " channels");
    }
    Expr y = tensor::causal_conv(x, weights, spec.dilation);
    if (bias) y = y + tensor::broadcast(bias, y.shape());
    return y;
}

Expr dense(const Expr& x, const Expr& weights, const Expr& bias) {
    Expr y = tensor::matmul(x, weights);
    if (bias) y = y + tensor::broadcast(bias, y.shape());
    return y;
}

Expr adaptive_max_pool(const Expr& features, std::size_t bins) {
    if (features.shape().size() != 2) {
        throw tensor::ShapeError("adaptive_max_pool: expected (rows, length), got " +
                                 tensor::shape_string(features.shape()));
    }
    if (bins == 0 || features.shape()[1] < bins) {
        throw std::invalid_argument("adaptive_max_pool: input length " + std::to_string(features.shape()[1]) +
                                    " is shorter than " + std::to_string(bins) + " bins");
    }
    return tensor::segment_max(features, bins);
}

Expr activate(const Expr& x, Activation activation, double leaky_slope) {
    switch (activation) {
        case Activation::Linear: return x;
        case Activation::Tanh: return tensor::tanh(x);
        case Activation::LeakyRelu: return tensor::leaky_relu(x, leaky_slope);
    }
    throw std::invalid_argument("unknown activation");
}

}  // namespace genboot::nn
