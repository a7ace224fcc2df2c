#pragma once

#include "genboot/tensor/array.hpp"
#include "genboot/tensor/expr.hpp"

#include <array>
#include <list>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace genboot::tensor {

enum class Backend {
    Parallel,   // kernels::parallel (production)
    Reference,  // kernels::reference and std:: math (slow, for cross-checking)
};

/// Accumulated wall time and call counts per op kind.
struct EvalProfile {
    std::array<double, kOpKindCount> seconds{};
    std::array<std::size_t, kOpKindCount> calls{};

    /// One line per op kind that ran, slowest first.
    std::string report() const;
};

struct EvalOptions {
    Backend backend = Backend::Parallel;
    EvalProfile* profile = nullptr;
};

/// Leaf name -> value. `set` borrows (the caller keeps the array alive until
/// evaluation returns); `own` moves the array in.
class Bindings {
public:
    Bindings& set(const std::string& name, const Array& value);
    Bindings& own(const std::string& name, Array value);
    const Array* find(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name) != nullptr; }

private:
    std::unordered_map<std::string, const Array*> views_;
    std::list<Array> owned_;
};

class UnboundLeafError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluates several roots in one pass, sharing common subgraphs. Intermediate
/// values are released as soon as their last consumer has run.
std::vector<Array> evaluate(std::span<const Expr> roots, const Bindings& bindings, const EvalOptions& options = {});
Array evaluate(const Expr& root, const Bindings& bindings, const EvalOptions& options = {});

/// Nodes reachable from `roots`, inputs before consumers, in a deterministic order.
std::vector<const Node*> topological_order(std::span<const Expr> roots);

}  // namespace genboot::tensor
