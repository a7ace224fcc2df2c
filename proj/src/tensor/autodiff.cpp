#include "genboot/tensor/autodiff.hpp"

#include <unordered_map>
#include <unordered_set>

namespace genboot::tensor {

namespace {

std::vector<Expr> expr_order(const Expr& root) {
    std::vector<Expr> order;
    std::unordered_set<const Node*> visited{root.get()};
    std::vector<std::pair<Expr, std::size_t>> stack{{root, 0}};
    while (!stack.empty()) {
        auto& [e, next] = stack.back();
        if (next < e.inputs().size()) {
            const Expr child = e.inputs()[next++];
            if (visited.insert(child.get()).second) stack.emplace_back(child, 0);
        } else {
            order.push_back(e);
            stack.pop_back();
        }
    }
    return order;
}

Expr zeros_with_last(const Shape& like, std::size_t last) {
    Shape s = like;
    s.back() = last;
    return zeros(s);
}

// Input gradients of `node` given the gradient `g` of its output. An empty Expr
// means "no contribution" (either not needed or identically zero).
std::vector<Expr> vjp(const Expr& node, const Expr& g, const std::vector<bool>& needed) {
    const auto& in = node.inputs();
    const auto& at = node.attrs();
    std::vector<Expr> out(in.size());
    auto want = [&](std::size_t i) { return needed[i]; };

    switch (node.kind()) {
        case OpKind::Leaf:
        case OpKind::Constant:
            break;
        case OpKind::Add:
            if (want(0)) out[0] = g;
            if (want(1)) out[1] = g;
            break;
        case OpKind::Mul:
            if (want(0)) out[0] = mul(g, in[1]);
            if (want(1)) out[1] = mul(g, in[0]);
            break;
        case OpKind::Affine:
            out[0] = affine(g, at.alpha, 0.0);
            break;
        case OpKind::Square:
            out[0] = mul(g, affine(in[0], 2.0, 0.0));
            break;
        case OpKind::Tanh:
            out[0] = mul(g, affine(square(node), -1.0, 1.0));
            break;
        case OpKind::Sigmoid:
            out[0] = mul(g, mul(node, affine(node, -1.0, 1.0)));
            break;
        case OpKind::Log:
            out[0] = mul(g, reciprocal(in[0]));
            break;
        case OpKind::Reciprocal:
            out[0] = mul(g, affine(square(node), -1.0, 0.0));
            break;
        case OpKind::LeakyRelu:
            out[0] = leaky_relu_grad(in[0], g, at.alpha);
            break;
        case OpKind::LeakyReluGrad:
            if (want(1)) out[1] = leaky_relu_grad(in[0], g, at.alpha);
            break;
        case OpKind::Clamp:
            out[0] = clamp_grad(in[0], g, at.alpha, at.beta);
            break;
        case OpKind::ClampGrad:
            if (want(1)) out[1] = clamp_grad(in[0], g, at.alpha, at.beta);
            break;
        case OpKind::MatMul: {
            const Expr& a = in[0];
            const Expr& b = in[1];
            const bool ta = at.transpose_a;
            const bool tb = at.transpose_b;
            if (want(0)) out[0] = ta ? matmul(b, g, tb, true) : matmul(g, b, false, !tb);
            if (want(1)) out[1] = tb ? matmul(g, a, true, ta) : matmul(a, g, !ta, false);
            break;
        }
        case OpKind::CausalConv: {
            const bool transposed = at.transpose_a;
            if (want(0)) out[0] = causal_conv(g, in[1], at.dilation, -at.direction, !transposed);
            if (want(1)) {
                out[1] = transposed ? conv_weight_grad(g, in[0], at.taps, at.dilation, -at.direction)
                                    : conv_weight_grad(in[0], g, at.taps, at.dilation, at.direction);
            }
            break;
        }
        case OpKind::ConvWeightGrad:
            if (want(0)) out[0] = causal_conv(in[1], g, at.dilation, -at.direction, true);
            if (want(1)) out[1] = causal_conv(in[0], g, at.dilation, at.direction, false);
            break;
        case OpKind::SegmentMax:
            out[0] = segment_scatter(in[0], g);
            break;
        case OpKind::SegmentScatter:
            if (want(1)) out[1] = segment_gather(in[0], g, at.bins);
            break;
        case OpKind::SegmentGather:
            if (want(1)) out[1] = segment_scatter(in[0], g);
            break;
        case OpKind::L2Norm: {
            const Expr coef = mul(g, reciprocal(node));
            out[0] = mul(in[0], broadcast(coef, in[0].shape(), Align::Trailing));
            break;
        }
        case OpKind::Broadcast:
            out[0] = sum_to(g, in[0].shape(), at.align);
            break;
        case OpKind::SumTo:
            out[0] = broadcast(g, in[0].shape(), at.align);
            break;
        case OpKind::ReduceSum:
            out[0] = broadcast(g, in[0].shape(), Align::Leading);
            break;
        case OpKind::ReduceMean:
            out[0] = affine(broadcast(g, in[0].shape(), Align::Leading), 1.0 / static_cast<double>(in[0].size()), 0.0);
            break;
        case OpKind::Reshape:
            out[0] = reshape(g, in[0].shape());
            break;
        case OpKind::Transpose:
            out[0] = transpose(g);
            break;
        case OpKind::Concat: {
            std::size_t offset = 0;
            for (std::size_t i = 0; i < in.size(); ++i) {
                const std::size_t w = in[i].shape().back();
                if (want(i)) out[i] = slice(g, offset, offset + w);
                offset += w;
            }
            break;
        }
        case OpKind::Slice: {
            const std::size_t width = in[0].shape().back();
            std::vector<Expr> parts;
            if (at.begin > 0) parts.push_back(zeros_with_last(g.shape(), at.begin));
            parts.push_back(g);
            if (at.end < width) parts.push_back(zeros_with_last(g.shape(), width - at.end));
            out[0] = concat(parts);
            break;
        }
    }
    return out;
}

}  // namespace

std::vector<Expr> gradient(const Expr& root, std::span<const Expr> wrt) {
    if (!root) throw std::invalid_argument("gradient: empty root expression");
    if (root.size() != 1) {
        throw ShapeError("gradient: root must be a single value, got shape " + shape_string(root.shape()));
    }
    std::unordered_set<const Node*> targets;
    for (const auto& w : wrt) {
        if (!w || w.kind() != OpKind::Leaf) throw std::invalid_argument("gradient: can only differentiate w.r.t. leaves");
        targets.insert(w.get());
    }

    const auto order = expr_order(root);
    std::unordered_set<const Node*> depends;
    for (const auto& e : order) {
        bool d = targets.contains(e.get());
        for (const auto& in : e.inputs()) d = d || depends.contains(in.get());
        if (d) depends.insert(e.get());
    }

    std::unordered_map<const Node*, Expr> grads;
    if (depends.contains(root.get())) grads[root.get()] = constant(Array(root.shape(), 1.0));

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const Expr& node = *it;
        auto found = grads.find(node.get());
        if (found == grads.end() || node.kind() == OpKind::Leaf) continue;
        std::vector<bool> needed;
        for (const auto& in : node.inputs()) needed.push_back(depends.contains(in.get()));
        const auto contributions = vjp(node, found->second, needed);
        for (std::size_t i = 0; i < contributions.size(); ++i) {
            if (!contributions[i] || !needed[i]) continue;
            const Node* key = node.inputs()[i].get();
            auto [slot, inserted] = grads.try_emplace(key, contributions[i]);
            if (!inserted) slot->second = add(slot->second, contributions[i]);
        }
    }

    std::vector<Expr> result;
    result.reserve(wrt.size());
    for (const auto& w : wrt) {
        auto found = grads.find(w.get());
        result.push_back(found != grads.end() ? found->second : zeros(w.shape()));
    }
    return result;
}

std::vector<Expr> collect_leaves(const Expr& root) {
    std::vector<Expr> leaves;
    for (const auto& e : expr_order(root)) {
        if (e.kind() == OpKind::Leaf) leaves.push_back(e);
    }
    return leaves;
}

std::vector<Expr> gradient(const Expr& root, const std::vector<std::string>& leaf_names) {
    const auto leaves = collect_leaves(root);
    std::vector<Expr> wrt;
    std::vector<int> slot;
    for (const auto& name : leaf_names) {
        int found = -1;
        for (const auto& l : leaves) {
            if (l.attrs().name == name) {
                found = static_cast<int>(wrt.size());
                wrt.push_back(l);
                break;
            }
        }
        slot.push_back(found);
    }
    const auto grads = gradient(root, wrt);
    std::vector<Expr> result;
    for (int s : slot) result.push_back(s >= 0 ? grads[static_cast<std::size_t>(s)] : scalar(0.0));
    return result;
}

}  // namespace genboot::tensor
