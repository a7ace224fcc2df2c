#include "genboot/gan/networks.hpp"

#include "genboot/tensor/evaluate.hpp"

#include <algorithm>
#include <stdexcept>

namespace genboot::gan {

namespace {

std::string layer_name(char net, std::size_t i) { return std::string(1, net) + ".c" + std::to_string(i + 1); }

std::vector<nn::ParamSpec> stack_specs(char net, const std::vector<nn::ConvLayerSpec>& layers) {
    std::vector<nn::ParamSpec> specs;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        auto p = nn::conv_params(layer_name(net, i), layers[i]);
        specs.insert(specs.end(), p.begin(), p.end());
    }
    return specs;
}

std::vector<nn::ConvLayerSpec> make_layers(std::size_t in, const std::vector<std::size_t>& filters,
                                           const std::vector<std::size_t>& dilations, std::size_t kernel) {
    std::vector<nn::ConvLayerSpec> layers;
    for (std::size_t i = 0; i < filters.size(); ++i) {
        layers.push_back({i == 0 ? in : filters[i - 1], filters[i], kernel, dilations[i], true});
    }
    return layers;
}

}  // namespace

Generator::Generator(GeneratorArch arch)
    : arch_(std::move(arch)),
      layers_(make_layers(arch_.noise_dim, arch_.filters, arch_.dilations, arch_.kernel_size)),
      params_(stack_specs('g', layers_)),
      p_(gan::receptive_field(arch_.dilations, arch_.kernel_size)) {
    if (arch_.filters.back() != 1) throw std::invalid_argument("generator: last layer must have 1 filter");
}

Expr Generator::build(const Expr& noise) const {
    const auto& s = noise.shape();
    if (s.size() != 3 || s[2] != arch_.noise_dim) {
        throw tensor::ShapeError("generator: noise must be (batch, rows, " + std::to_string(arch_.noise_dim) +
                                 "), got " + tensor::shape_string(s));
    }
    if (s[1] <= p_) {
        throw tensor::ShapeError("generator: " + std::to_string(s[1]) + " noise rows cannot produce any output with p = " +
                                 std::to_string(p_));
    }
    Expr h = noise;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const auto name = layer_name('g', i);
        h = nn::causal_dilated_conv(h, layers_[i], params_[name + ".w"], params_[name + ".b"]);
        if (i + 1 < layers_.size()) h = nn::activate(h, nn::Activation::Tanh);
    }
    h = tensor::reshape(h, {s[0], s[1]});
    return tensor::slice(h, p_, s[1]);
}

Discriminator::Discriminator(DiscriminatorArch arch)
    : arch_(std::move(arch)), layers_(make_layers(1, arch_.filters, arch_.dilations, arch_.kernel_size)) {
    auto specs = stack_specs('d', layers_);
    const std::size_t features = arch_.pool_taps.size() * arch_.pool_bins;
    for (const auto& p : nn::dense_params("d.fc1", {features, arch_.hidden, true})) specs.push_back(p);
    for (const auto& p : nn::dense_params("d.fc2", {arch_.hidden, 1, true})) specs.push_back(p);
    params_ = nn::ParamLeaves(std::move(specs));
    for (auto t : arch_.pool_taps) {
        if (t == 0 || t > layers_.size()) {
            throw std::invalid_argument("discriminator: pooling tap " + std::to_string(t) + " is not a conv layer");
        }
    }
}

std::size_t Discriminator::min_length() const noexcept {
    std::size_t shortest = 1;
    for (auto t : arch_.pool_taps) {
        const std::size_t c = arch_.filters[t - 1];
        shortest = std::max(shortest, (arch_.pool_bins + c - 1) / c);
    }
    return shortest;
}

Expr Discriminator::build(const Expr& paths) const {
    const auto& s = paths.shape();
    if (s.size() != 2) throw tensor::ShapeError("discriminator: paths must be (batch, T), got " + tensor::shape_string(s));
    if (s[1] < min_length()) {
        throw std::invalid_argument("discriminator: path length " + std::to_string(s[1]) + " is below the minimum " +
                                    std::to_string(min_length()) + " imposed by the pooling bins");
    }
    const std::size_t batch = s[0];
    const std::size_t T = s[1];
    Expr h = tensor::reshape(paths, {batch, T, 1});
    std::vector<Expr> pooled;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const auto name = layer_name('d', i);
        h = nn::causal_dilated_conv(h, layers_[i], params_[name + ".w"], params_[name + ".b"]);
        h = nn::activate(h, nn::Activation::LeakyRelu, arch_.leaky_slope);
        if (std::find(arch_.pool_taps.begin(), arch_.pool_taps.end(), i + 1) != arch_.pool_taps.end()) {
            const std::size_t c = layers_[i].out_channels;
            Expr flat = tensor::reshape(tensor::transpose(h), {batch, c * T});
            pooled.push_back(nn::adaptive_max_pool(flat, arch_.pool_bins));
        }
    }
    Expr f = tensor::concat(pooled);
    f = nn::activate(nn::dense(f, params_["d.fc1.w"], params_["d.fc1.b"]), nn::Activation::LeakyRelu,
                     arch_.leaky_slope);
    f = nn::dense(f, params_["d.fc2.w"], params_["d.fc2.b"]);
    return tensor::reshape(f, {batch});
}

Array generate(const Generator& generator, const nn::NetworkParams& params, const Array& noise) {
    const bool single = noise.rank() == 2;
    if (!single && noise.rank() != 3) {
        throw tensor::ShapeError("generate: noise must be (rows, noise_dim) or (n, rows, noise_dim), got " +
                                 tensor::shape_string(noise.shape()));
    }
    const tensor::Shape shape = single ? tensor::Shape{1, noise.dim(0), noise.dim(1)} : noise.shape();
    const Expr z = tensor::leaf("noise", shape);
    const Expr out = generator.build(z);
    tensor::Bindings b;
    params.bind(b);
    const Array reshaped = single ? noise.reshaped(shape) : Array{};
    b.set("noise", single ? reshaped : noise);
    Array y = tensor::evaluate(out, b);
    return single ? std::move(y).reshaped({y.size()}) : y;
}

Array discriminate(const Discriminator& discriminator, const nn::NetworkParams& params, const Array& paths) {
    const bool single = paths.rank() == 1;
    if (!single && paths.rank() != 2) {
        throw tensor::ShapeError("discriminate: paths must be (T) or (n, T), got " + tensor::shape_string(paths.shape()));
    }
    const tensor::Shape shape = single ? tensor::Shape{1, paths.size()} : paths.shape();
    const Expr x = tensor::leaf("paths", shape);
    tensor::Bindings b;
    params.bind(b);
    const Array reshaped = single ? paths.reshaped(shape) : Array{};
    b.set("paths", single ? reshaped : paths);
    Array y = tensor::evaluate(discriminator.build(x), b);
    return single ? Array::scalar(y[0]) : y;
}

}  // namespace genboot::gan
