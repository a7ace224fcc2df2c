#pragma once

// Symbolic computation graph over dense arrays.
//
// Every node is immutable once built and carries its static shape, so shape
// errors surface when the graph is constructed. Values are produced by
// tensor::evaluate against a set of leaf bindings. Gradients (autodiff.hpp)
// are themselves graphs built from the same primitives, which is what makes
// second derivatives available.

#include "genboot/tensor/array.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace genboot::tensor {

enum class OpKind {
    Leaf,            // named input bound at evaluation time
    Constant,        // fixed array
    Add,
    Mul,
    Affine,          // alpha * x + beta
    Square,
    Tanh,
    Sigmoid,
    Log,
    Reciprocal,      // 1 / x, defined as 0 at x == 0
    LeakyRelu,       // max(x, slope * x); slope used for x < 0
    LeakyReluGrad,   // g * (x >= 0 ? 1 : slope)
    Clamp,           // min(max(x, lo), hi)
    ClampGrad,       // g * (lo <= x <= hi)
    MatMul,          // op(a) @ op(b) on rank-2 arrays
    CausalConv,      // see kernels::ConvGeometry
    ConvWeightGrad,  // see kernels::WeightGradGeometry
    SegmentMax,      // per-row max over `bins` contiguous segments
    SegmentScatter,  // routes (rows, bins) gradients to the segment argmax positions of keys
    SegmentGather,   // reads values at the segment argmax positions of keys
    L2Norm,          // Euclidean norm of every row of a rank-2 array
    Broadcast,
    SumTo,
    ReduceSum,
    ReduceMean,
    Reshape,
    Transpose,       // swaps the last two axes
    Concat,          // along the last axis
    Slice,           // [begin, end) along the last axis
};

inline constexpr std::size_t kOpKindCount = static_cast<std::size_t>(OpKind::Slice) + 1;

std::string_view op_name(OpKind kind) noexcept;

/// How a smaller shape aligns with a larger one in Broadcast / SumTo.
enum class Align {
    Leading,   // small shape is a suffix of the large one; repeated over leading axes
    Trailing,  // small shape is a prefix of the large one; repeated over trailing axes
};

struct OpAttributes {
    double alpha = 1.0;  // Affine scale, leaky slope, clamp lower bound
    double beta = 0.0;   // Affine offset, clamp upper bound
    std::size_t dilation = 1;
    std::size_t taps = 1;
    std::size_t bins = 1;
    std::size_t begin = 0;
    std::size_t end = 0;
    int direction = 1;
    bool transpose_a = false;  // also: CausalConv transposed weights
    bool transpose_b = false;
    Align align = Align::Leading;
    std::string name;
    std::shared_ptr<const Array> constant;
};

class Node;

/// Shared handle to an immutable graph node. A default-constructed Expr is empty.
class Expr {
public:
    Expr() = default;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    explicit operator bool() const noexcept { return static_cast<bool>(node_); }
    const Node* get() const noexcept { return node_.get(); }
    const Node& node() const { return *node_; }

    OpKind kind() const;
    const Shape& shape() const;
    const std::vector<Expr>& inputs() const;
    const OpAttributes& attrs() const;

    std::size_t size() const { return element_count(shape()); }

private:
    std::shared_ptr<const Node> node_;
};

class Node {
public:
    Node(OpKind kind, std::vector<Expr> inputs, Shape shape, OpAttributes attrs)
        : kind_(kind), inputs_(std::move(inputs)), shape_(std::move(shape)), attrs_(std::move(attrs)) {}

    OpKind kind() const noexcept { return kind_; }
    const std::vector<Expr>& inputs() const noexcept { return inputs_; }
    const Shape& shape() const noexcept { return shape_; }
    const OpAttributes& attrs() const noexcept { return attrs_; }

private:
    OpKind kind_;
    std::vector<Expr> inputs_;
    Shape shape_;
    OpAttributes attrs_;
};

// Leaves and constants.
Expr leaf(std::string name, Shape shape);
Expr constant(Array value);
Expr scalar(double value);
Expr zeros(const Shape& shape);

// Elementwise. Binary operands must have identical shapes; use broadcast() first.
Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b);
Expr affine(const Expr& x, double alpha, double beta);
Expr square(const Expr& x);
Expr tanh(const Expr& x);
Expr sigmoid(const Expr& x);
Expr log(const Expr& x);
Expr reciprocal(const Expr& x);
Expr leaky_relu(const Expr& x, double slope);
Expr leaky_relu_grad(const Expr& x, const Expr& upstream, double slope);
Expr clamp(const Expr& x, double lo, double hi);
Expr clamp_grad(const Expr& x, const Expr& upstream, double lo, double hi);

// Linear algebra and convolution.
Expr matmul(const Expr& a, const Expr& b, bool transpose_a = false, bool transpose_b = false);
Expr causal_conv(const Expr& x, const Expr& weights, std::size_t dilation, int direction = 1,
                 bool transpose_weights = false);
Expr conv_weight_grad(const Expr& u, const Expr& v, std::size_t taps, std::size_t dilation, int direction);

// Segment pooling on (rows, length) arrays.
Expr segment_max(const Expr& x, std::size_t bins);
Expr segment_scatter(const Expr& keys, const Expr& upstream);
Expr segment_gather(const Expr& keys, const Expr& values, std::size_t bins);

// Reductions and shape manipulation.
Expr l2_norm(const Expr& x);
Expr broadcast(const Expr& x, const Shape& shape, Align align = Align::Leading);
Expr sum_to(const Expr& x, const Shape& shape, Align align = Align::Leading);
Expr reduce_sum(const Expr& x);
Expr reduce_mean(const Expr& x);
Expr reshape(const Expr& x, Shape shape);
Expr transpose(const Expr& x);
Expr concat(const std::vector<Expr>& parts);
Expr slice(const Expr& x, std::size_t begin, std::size_t end);

inline Expr operator+(const Expr& a, const Expr& b) { return add(a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return sub(a, b); }
inline Expr operator*(const Expr& a, const Expr& b) { return mul(a, b); }
inline Expr operator-(const Expr& x) { return affine(x, -1.0, 0.0); }
inline Expr operator*(double s, const Expr& x) { return affine(x, s, 0.0); }
inline Expr operator*(const Expr& x, double s) { return affine(x, s, 0.0); }
inline Expr operator+(const Expr& x, double c) { return affine(x, 1.0, c); }
inline Expr operator-(const Expr& x, double c) { return affine(x, 1.0, -c); }

}  // namespace genboot::tensor
