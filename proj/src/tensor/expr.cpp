#include "genboot/tensor/expr.hpp"

#include <algorithm>

namespace genboot::tensor {

std::string_view op_name(OpKind kind) noexcept {
    switch (kind) {
        case OpKind::Leaf: return "leaf";
        case OpKind::Constant: return "constant";
        case OpKind::Add: return "add";
        case OpKind::Mul: return "mul";
        case OpKind::Affine: return "affine";
        case OpKind::Square: return "square";
        case OpKind::Tanh: return "tanh";
        case OpKind::Sigmoid: return "sigmoid";
        case OpKind::Log: return "log";
        case OpKind::Reciprocal: return "reciprocal";
        case OpKind::LeakyRelu: return "leaky_relu";
        case OpKind::LeakyReluGrad: return "leaky_relu_grad";
        case OpKind::Clamp: return "clamp";
        case OpKind::ClampGrad: return "clamp_grad";
        case OpKind::MatMul: return "matmul";
        case OpKind::CausalConv: return "causal_conv";
        case OpKind::ConvWeightGrad: return "conv_weight_grad";
        case OpKind::SegmentMax: return "segment_max";
        case OpKind::SegmentScatter: return "segment_scatter";
        case OpKind::SegmentGather: return "segment_gather";
        case OpKind::L2Norm: return "l2_norm";
        case OpKind::Broadcast: return "broadcast";
        case OpKind::SumTo: return "sum_to";
        case OpKind::ReduceSum: return "reduce_sum";
        case OpKind::ReduceMean: return "reduce_mean";
        case OpKind::Reshape: return "reshape";
        case OpKind::Transpose: return "transpose";
        case OpKind::Concat: return "concat";
        case OpKind::Slice: return "slice";
    }
    return "unknown";
}

OpKind Expr::kind() const { return node_->kind(); }
const Shape& Expr::shape() const { return node_->shape(); }
const std::vector<Expr>& Expr::inputs() const { return node_->inputs(); }
const OpAttributes& Expr::attrs() const { return node_->attrs(); }

namespace {

Expr make(OpKind kind, std::vector<Expr> inputs, Shape shape, OpAttributes attrs = {}) {
    for (const auto& in : inputs) {
        if (!in) throw std::invalid_argument(std::string(op_name(kind)) + ": empty input expression");
    }
    return Expr(std::make_shared<const Node>(kind, std::move(inputs), std::move(shape), std::move(attrs)));
}

[[noreturn]] void shape_fail(OpKind kind, const std::string& detail) {
    throw ShapeError(std::string(op_name(kind)) + ": " + detail);
}

void require_same(OpKind kind, const Expr& a, const Expr& b) {
    if (a.shape() != b.shape()) {
        shape_fail(kind, "operand shapes " + shape_string(a.shape()) + " and " + shape_string(b.shape()) + " differ");
    }
}

void require_rank(OpKind kind, const Expr& x, std::size_t rank, const char* what) {
    if (x.shape().size() != rank) {
        shape_fail(kind, std::string(what) + " must have rank " + std::to_string(rank) + ", got " +
                             shape_string(x.shape()));
    }
}

Expr unary(OpKind kind, const Expr& x, OpAttributes attrs = {}) {
    Shape s = x.shape();
    return make(kind, {x}, std::move(s), std::move(attrs));
}

bool aligned(const Shape& small, const Shape& large, Align align) {
    if (small.size() > large.size()) return false;
    if (align == Align::Leading) {
        return std::equal(small.begin(), small.end(), large.end() - static_cast<long>(small.size()));
    }
    return std::equal(small.begin(), small.end(), large.begin());
}

}  // namespace

Expr leaf(std::string name, Shape shape) {
    if (name.empty()) throw std::invalid_argument("leaf: name must not be empty");
    OpAttributes attrs;
    attrs.name = std::move(name);
    return make(OpKind::Leaf, {}, std::move(shape), std::move(attrs));
}

Expr constant(Array value) {
    OpAttributes attrs;
    Shape shape = value.shape();
    attrs.constant = std::make_shared<const Array>(std::move(value));
    return make(OpKind::Constant, {}, std::move(shape), std::move(attrs));
}

Expr scalar(double value) { return constant(Array::scalar(value)); }

Expr zeros(const Shape& shape) { return constant(Array(shape, 0.0)); }

Expr add(const Expr& a, const Expr& b) {
    require_same(OpKind::Add, a, b);
    return make(OpKind::Add, {a, b}, a.shape());
}

Expr sub(const Expr& a, const Expr& b) { return add(a, affine(b, -1.0, 0.0)); }

Expr mul(const Expr& a, const Expr& b) {
    require_same(OpKind::Mul, a, b);
    return make(OpKind::Mul, {a, b}, a.shape());
}

Expr affine(const Expr& x, double alpha, double beta) {
    OpAttributes attrs;
    attrs.alpha = alpha;
    attrs.beta = beta;
    return unary(OpKind::Affine, x, attrs);
}

Expr square(const Expr& x) { return unary(OpKind::Square, x); }
Expr tanh(const Expr& x) { return unary(OpKind::Tanh, x); }
Expr sigmoid(const Expr& x) { return unary(OpKind::Sigmoid, x); }
Expr log(const Expr& x) { return unary(OpKind::Log, x); }
Expr reciprocal(const Expr& x) { return unary(OpKind::Reciprocal, x); }

Expr leaky_relu(const Expr& x, double slope) {
    OpAttributes attrs;
    attrs.alpha = slope;
    return unary(OpKind::LeakyRelu, x, attrs);
}

Expr leaky_relu_grad(const Expr& x, const Expr& upstream, double slope) {
    require_same(OpKind::LeakyReluGrad, x, upstream);
    OpAttributes attrs;
    attrs.alpha = slope;
    return make(OpKind::LeakyReluGrad, {x, upstream}, x.shape(), attrs);
}

Expr clamp(const Expr& x, double lo, double hi) {
    if (!(lo <= hi)) throw std::invalid_argument("clamp: lower bound exceeds upper bound");
    OpAttributes attrs;
    attrs.alpha = lo;
    attrs.beta = hi;
    return unary(OpKind::Clamp, x, attrs);
}

Expr clamp_grad(const Expr& x, const Expr& upstream, double lo, double hi) {
    require_same(OpKind::ClampGrad, x, upstream);
    OpAttributes attrs;
    attrs.alpha = lo;
    attrs.beta = hi;
    return make(OpKind::ClampGrad, {x, upstream}, x.shape(), attrs);
}

Expr matmul(const Expr& a, const Expr& b, bool transpose_a, bool transpose_b) {
    require_rank(OpKind::MatMul, a, 2, "left operand");
    require_rank(OpKind::MatMul, b, 2, "right operand");
    const std::size_t rows = transpose_a ? a.shape()[1] : a.shape()[0];
    const std::size_t inner_a = transpose_a ? a.shape()[0] : a.shape()[1];
    const std::size_t inner_b = transpose_b ? b.shape()[1] : b.shape()[0];
    const std::size_t cols = transpose_b ? b.shape()[0] : b.shape()[1];
    if (inner_a != inner_b) {
        shape_fail(OpKind::MatMul, "inner dimensions of " + shape_string(a.shape()) + " and " +
                                       shape_string(b.shape()) + " do not match");
    }
    OpAttributes attrs;
    attrs.transpose_a = transpose_a;
    attrs.transpose_b = transpose_b;
    return make(OpKind::MatMul, {a, b}, Shape{rows, cols}, attrs);
}

Expr causal_conv(const Expr& x, const Expr& weights, std::size_t dilation, int direction, bool transpose_weights) {
    require_rank(OpKind::CausalConv, x, 3, "input");
    require_rank(OpKind::CausalConv, weights, 3, "weights");
    if (dilation == 0) shape_fail(OpKind::CausalConv, "dilation must be at least 1");
    if (direction != 1 && direction != -1) shape_fail(OpKind::CausalConv, "direction must be +1 or -1");
    const auto& ws = weights.shape();
    const std::size_t expects = transpose_weights ? ws[2] : ws[1];
    const std::size_t produces = transpose_weights ? ws[1] : ws[2];
    if (x.shape()[2] != expects) {
        shape_fail(OpKind::CausalConv, "input has " + std::to_string(x.shape()[2]) + " channels but weights " +
                                           shape_string(ws) + " expect " + std::to_string(expects));
    }
    OpAttributes attrs;
    attrs.dilation = dilation;
    attrs.direction = direction;
    attrs.taps = ws[0];
    attrs.transpose_a = transpose_weights;
    return make(OpKind::CausalConv, {x, weights}, Shape{x.shape()[0], x.shape()[1], produces}, attrs);
}

Expr conv_weight_grad(const Expr& u, const Expr& v, std::size_t taps, std::size_t dilation, int direction) {
    require_rank(OpKind::ConvWeightGrad, u, 3, "first operand");
    require_rank(OpKind::ConvWeightGrad, v, 3, "second operand");
    if (u.shape()[0] != v.shape()[0] || u.shape()[1] != v.shape()[1]) {
        shape_fail(OpKind::ConvWeightGrad,
                   "batch/time extents of " + shape_string(u.shape()) + " and " + shape_string(v.shape()) + " differ");
    }
    OpAttributes attrs;
    attrs.dilation = dilation;
    attrs.direction = direction;
    attrs.taps = taps;
    return make(OpKind::ConvWeightGrad, {u, v}, Shape{taps, u.shape()[2], v.shape()[2]}, attrs);
}

Expr segment_max(const Expr& x, std::size_t bins) {
    require_rank(OpKind::SegmentMax, x, 2, "input");
    if (bins == 0 || x.shape()[1] < bins) {
        shape_fail(OpKind::SegmentMax, "cannot pool length " + std::to_string(x.shape()[1]) + " into " +
                                           std::to_string(bins) + " bins");
    }
    OpAttributes attrs;
    attrs.bins = bins;
    return make(OpKind::SegmentMax, {x}, Shape{x.shape()[0], bins}, attrs);
}

Expr segment_scatter(const Expr& keys, const Expr& upstream) {
    require_rank(OpKind::SegmentScatter, keys, 2, "keys");
    require_rank(OpKind::SegmentScatter, upstream, 2, "upstream");
    if (keys.shape()[0] != upstream.shape()[0] || upstream.shape()[1] > keys.shape()[1]) {
        shape_fail(OpKind::SegmentScatter,
                   "keys " + shape_string(keys.shape()) + " incompatible with " + shape_string(upstream.shape()));
    }
    OpAttributes attrs;
    attrs.bins = upstream.shape()[1];
    return make(OpKind::SegmentScatter, {keys, upstream}, keys.shape(), attrs);
}

Expr segment_gather(const Expr& keys, const Expr& values, std::size_t bins) {
    require_same(OpKind::SegmentGather, keys, values);
    require_rank(OpKind::SegmentGather, keys, 2, "keys");
    if (bins == 0 || keys.shape()[1] < bins) shape_fail(OpKind::SegmentGather, "invalid bin count");
    OpAttributes attrs;
    attrs.bins = bins;
    return make(OpKind::SegmentGather, {keys, values}, Shape{keys.shape()[0], bins}, attrs);
}

Expr l2_norm(const Expr& x) {
    require_rank(OpKind::L2Norm, x, 2, "input");
    return make(OpKind::L2Norm, {x}, Shape{x.shape()[0]});
}

Expr broadcast(const Expr& x, const Shape& shape, Align align) {
    if (!aligned(x.shape(), shape, align)) {
        shape_fail(OpKind::Broadcast, "cannot broadcast " + shape_string(x.shape()) + " to " + shape_string(shape));
    }
    if (x.shape() == shape) return x;
    OpAttributes attrs;
    attrs.align = align;
    return make(OpKind::Broadcast, {x}, shape, attrs);
}

Expr sum_to(const Expr& x, const Shape& shape, Align align) {
    if (!aligned(shape, x.shape(), align)) {
        shape_fail(OpKind::SumTo, "cannot sum " + shape_string(x.shape()) + " to " + shape_string(shape));
    }
    if (x.shape() == shape) return x;
    OpAttributes attrs;
    attrs.align = align;
    return make(OpKind::SumTo, {x}, shape, attrs);
}

Expr reduce_sum(const Expr& x) { return make(OpKind::ReduceSum, {x}, Shape{}); }
Expr reduce_mean(const Expr& x) { return make(OpKind::ReduceMean, {x}, Shape{}); }

Expr reshape(const Expr& x, Shape shape) {
    if (element_count(shape) != x.size()) {
        shape_fail(OpKind::Reshape, shape_string(x.shape()) + " -> " + shape_string(shape) + " changes element count");
    }
    if (shape == x.shape()) return x;
    return make(OpKind::Reshape, {x}, std::move(shape));
}

Expr transpose(const Expr& x) {
    if (x.shape().size() < 2) shape_fail(OpKind::Transpose, "needs rank >= 2, got " + shape_string(x.shape()));
    Shape s = x.shape();
    std::swap(s[s.size() - 1], s[s.size() - 2]);
    return make(OpKind::Transpose, {x}, std::move(s));
}

Expr concat(const std::vector<Expr>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat: no parts");
    if (parts.size() == 1) return parts.front();
    const Shape& first = parts.front().shape();
    if (first.empty()) shape_fail(OpKind::Concat, "parts must have rank >= 1");
    Shape out = first;
    out.back() = 0;
    for (const auto& p : parts) {
        const Shape& s = p.shape();
        if (s.size() != first.size() || !std::equal(s.begin(), s.end() - 1, first.begin())) {
            shape_fail(OpKind::Concat, "part " + shape_string(s) + " incompatible with " + shape_string(first));
        }
        out.back() += s.back();
    }
    return make(OpKind::Concat, parts, std::move(out));
}

Expr slice(const Expr& x, std::size_t begin, std::size_t end) {
    if (x.shape().empty() || begin >= end || end > x.shape().back()) {
        shape_fail(OpKind::Slice, "range [" + std::to_string(begin) + ", " + std::to_string(end) +
                                      ") invalid for " + shape_string(x.shape()));
    }
    if (begin == 0 && end == x.shape().back()) return x;
    Shape s = x.shape();
    s.back() = end - begin;
    OpAttributes attrs;
    attrs.begin = begin;
    attrs.end = end;
    return make(OpKind::Slice, {x}, std::move(s), attrs);
}

}  // namespace genboot::tensor
