#pragma once

#include "genboot/tensor/expr.hpp"

#include <span>
#include <string>
#include <vector>

namespace genboot::tensor {

/// Reverse-mode gradient of a single-element expression with respect to leaves.
///
/// The result is a graph built from the same primitive set as the input, so it
/// can be evaluated, combined into new losses and differentiated again. A leaf
/// that the root does not depend on gets a constant zero gradient.
///
/// Conventions at non-smooth points: leaky_relu'(0) = 1, clamp' = 1 on the closed
/// interval, the gradient of l2_norm at a zero row is zero, and segment_max routes
/// the gradient to the first maximum of each segment.
std::vector<Expr> gradient(const Expr& root, std::span<const Expr> wrt);

/// Same, addressing leaves by name. A name with no matching leaf in the graph
/// has no known shape, so its gradient is the scalar constant 0.
std::vector<Expr> gradient(const Expr& root, const std::vector<std::string>& leaf_names);

/// Every distinct leaf reachable from `root`, in deterministic order.
std::vector<Expr> collect_leaves(const Expr& root);

}  // namespace genboot::tensor
