#include "genboot/nn/params.hpp"

#include <stdexcept>

namespace genboot::nn {

std::size_t parameter_count(std::span<const ParamSpec> arch) {
    std::size_t n = 0;
    for (const auto& p : arch) n += tensor::element_count(p.shape);
    return n;
}

void NetworkParams::add(std::string name, Array value) {
    if (contains(name)) throw std::invalid_argument("duplicate parameter block '" + name + "'");
    names_.push_back(std::move(name));
    values_.push_back(std::move(value));
}

std::size_t NetworkParams::index_of(std::string_view name) const noexcept {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return i;
    }
    return names_.size();
}

Array& NetworkParams::at(std::string_view name) {
    const auto i = index_of(name);
    if (i == names_.size()) throw std::out_of_range("no parameter block '" + std::string(name) + "'");
    return values_[i];
}

const Array& NetworkParams::at(std::string_view name) const {
    return const_cast<NetworkParams*>(this)->at(name);
}

std::size_t NetworkParams::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& v : values_) n += v.size();
    return n;
}

void NetworkParams::bind(tensor::Bindings& bindings) const {
    for (std::size_t i = 0; i < names_.size(); ++i) bindings.set(names_[i], values_[i]);
}

NetworkParams init_network(std::span<const ParamSpec> arch, const InitSpec& init, Rng& rng) {
    if (!(init.sigma > 0.0)) throw std::invalid_argument("init: sigma must be positive");
    NetworkParams params;
    for (const auto& spec : arch) {
        Array value(spec.shape);
        if (!spec.is_bias) {
            fill_standard_normal(rng, value.values());
            for (auto& x : value.values()) x *= init.sigma;
        }
        params.add(spec.name, std::move(value));
    }
    return params;
}

ParamLeaves::ParamLeaves(std::vector<ParamSpec> specs) : specs_(std::move(specs)) {
    for (const auto& s : specs_) leaves_.push_back(tensor::leaf(s.name, s.shape));
}

const Expr& ParamLeaves::operator[](std::string_view name) const {
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        if (specs_[i].name == name) return leaves_[i];
    }
    throw std::out_of_range("no parameter leaf '" + std::string(name) + "'");
}

bool ParamLeaves::contains(std::string_view name) const noexcept {
    for (const auto& s : specs_) {
        if (s.name == name) return true;
    }
    return false;
}

}  // namespace genboot::nn
