#pragma once

#include "genboot/rng.hpp"
#include "genboot/tensor/array.hpp"
#include "genboot/tensor/evaluate.hpp"
#include "genboot/tensor/expr.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace genboot::nn {

using tensor::Array;
using tensor::Expr;
using tensor::Shape;

/// One named parameter block of an architecture.
struct ParamSpec {
    std::string name;
    Shape shape;
    bool is_bias = false;
};

/// Weights are iid N(0, sigma^2); biases start at zero.
struct InitSpec {
    double sigma = 0.02;
};

std::size_t parameter_count(std::span<const ParamSpec> arch);

/// Ordered collection of named parameter values (theta_G or theta_D).
class NetworkParams {
public:
    void add(std::string name, Array value);

    std::size_t block_count() const noexcept { return values_.size(); }
    const std::string& name(std::size_t i) const { return names_.at(i); }
    Array& value(std::size_t i) { return values_.at(i); }
    const Array& value(std::size_t i) const { return values_.at(i); }

    bool contains(std::string_view name) const noexcept { return index_of(name) < block_count(); }
    Array& at(std::string_view name);
    const Array& at(std::string_view name) const;

    std::size_t parameter_count() const noexcept;

    /// Borrows every block into `bindings` under its own name.
    void bind(tensor::Bindings& bindings) const;

    bool operator==(const NetworkParams&) const = default;

private:
    std::size_t index_of(std::string_view name) const noexcept;

    std::vector<std::string> names_;
    std::vector<Array> values_;
};

NetworkParams init_network(std::span<const ParamSpec> arch, const InitSpec& init, Rng& rng);

/// Leaf expressions for an architecture. Graphs that should be differentiated
/// with respect to the parameters must be built from the same ParamLeaves.
class ParamLeaves {
public:
    ParamLeaves() = default;
    explicit ParamLeaves(std::vector<ParamSpec> specs);

    const std::vector<ParamSpec>& specs() const noexcept { return specs_; }
    const std::vector<Expr>& leaves() const noexcept { return leaves_; }
    const Expr& operator[](std::string_view name) const;
    bool contains(std::string_view name) const noexcept;

private:
    std::vector<ParamSpec> specs_;
    std::vector<Expr> leaves_;
};

}  // namespace genboot::nn
