#include "genboot/tensor/evaluate.hpp"

#include "genboot/kernels/kernels.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace genboot::tensor {

Bindings& Bindings::set(const std::string& name, const Array& value) {
    views_[name] = &value;
    return *this;
}

Bindings& Bindings::own(const std::string& name, Array value) {
    owned_.push_back(std::move(value));
    views_[name] = &owned_.back();
    return *this;
}

const Array* Bindings::find(std::string_view name) const {
    auto it = views_.find(std::string(name));
    return it == views_.end() ? nullptr : it->second;
}

std::vector<const Node*> topological_order(std::span<const Expr> roots) {
    std::vector<const Node*> order;
    std::unordered_set<const Node*> visited;
    std::vector<std::pair<const Node*, std::size_t>> stack;
    for (const auto& root : roots) {
        if (!root || visited.contains(root.get())) continue;
        stack.emplace_back(root.get(), 0);
        visited.insert(root.get());
        while (!stack.empty()) {
            auto& [node, next] = stack.back();
            if (next < node->inputs().size()) {
                const Node* child = node->inputs()[next++].get();
                if (visited.insert(child).second) stack.emplace_back(child, 0);
            } else {
                order.push_back(node);
                stack.pop_back();
            }
        }
    }
    return order;
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Output buffer for an elementwise op: the donated input when there is one
// (the op is its last consumer), otherwise fresh storage.
Array take_or_alloc(Array*& donor, const Shape& shape) {
    if (donor != nullptr && donor->shape() == shape) return std::move(*donor);
    donor = nullptr;
    return Array(shape);
}

template <class F>
Array map_unary(const Array& x, F f, Array* donor) {
    const auto n = static_cast<long>(x.size());
    const double* in = x.data();
    Array out = take_or_alloc(donor, x.shape());
    if (donor != nullptr) in = out.data();
    double* dst = out.data();
#pragma omp parallel for simd schedule(static) if (n > 65536)
    for (long i = 0; i < n; ++i) dst[i] = f(in[i]);
    return out;
}

// `donor` is 0 or 1 for the input whose storage may be reused, -1 for none.
template <class F>
Array map_binary(const Array& a, const Array& b, F f, Array* donor, int which) {
    const auto n = static_cast<long>(a.size());
    const double* pa = a.data();
    const double* pb = b.data();
    Array out = take_or_alloc(donor, a.shape());
    if (donor != nullptr && which == 0) pa = out.data();
    if (donor != nullptr && which == 1) pb = out.data();
    double* dst = out.data();
#pragma omp parallel for simd schedule(static) if (n > 65536)
    for (long i = 0; i < n; ++i) dst[i] = f(pa[i], pb[i]);
    return out;
}

// Product of the leading extents (all but the last `tail` axes).
std::size_t leading_count(const Shape& s, std::size_t tail) {
    std::size_t n = 1;
    for (std::size_t i = 0; i + tail < s.size(); ++i) n *= s[i];
    return n;
}

class Computer {
public:
    explicit Computer(Backend backend) : backend_(backend) {}

    /// `donor`, when non-null, is the owned value of input `which`, which this
    /// node consumes last; its storage may be taken for the result.
    Array operator()(const Node& node, std::span<const Array* const> in, Array* donor = nullptr,
                     int which = -1) const {
        const auto& a = node.attrs();
        Array* d0 = which == 0 ? donor : nullptr;
        switch (node.kind()) {
            case OpKind::Leaf:
            case OpKind::Constant:
                break;  // handled by the caller
            case OpKind::Add:
                return map_binary(*in[0], *in[1], [](double x, double y) { return x + y; }, donor, which);
            case OpKind::Mul:
                return map_binary(*in[0], *in[1], [](double x, double y) { return x * y; }, donor, which);
            case OpKind::Affine: {
                const double s = a.alpha;
                const double c = a.beta;
                return map_unary(*in[0], [s, c](double x) { return s * x + c; }, d0);
            }
            case OpKind::Square:
                return map_unary(*in[0], [](double x) { return x * x; }, d0);
            case OpKind::Tanh: {
                Array out = take_or_alloc(d0, in[0]->shape());
                const std::span<const double> x = d0 != nullptr ? out.values() : in[0]->values();
                if (backend_ == Backend::Parallel) {
                    kernels::parallel::tanh(x, out.values());
                } else {
                    kernels::reference::tanh(x, out.values());
                }
                return out;
            }
            case OpKind::Sigmoid:
                return map_unary(*in[0], [](double x) { return 1.0 / (1.0 + std::exp(-x)); }, d0);
            case OpKind::Log:
                return map_unary(*in[0], [](double x) { return std::log(x); }, d0);
            case OpKind::Reciprocal:
                return map_unary(*in[0], [](double x) { return x == 0.0 ? 0.0 : 1.0 / x; }, d0);
            case OpKind::LeakyRelu: {
                const double slope = a.alpha;
                return map_unary(*in[0], [slope](double x) { return x >= 0.0 ? x : slope * x; }, d0);
            }
            case OpKind::LeakyReluGrad: {
                const double slope = a.alpha;
                return map_binary(*in[0], *in[1], [slope](double x, double g) { return x >= 0.0 ? g : slope * g; }, donor, which);
            }
            case OpKind::Clamp: {
                const double lo = a.alpha;
                const double hi = a.beta;
                return map_unary(*in[0], [lo, hi](double x) { return std::min(std::max(x, lo), hi); }, d0);
            }
            case OpKind::ClampGrad: {
                const double lo = a.alpha;
                const double hi = a.beta;
                return map_binary(*in[0], *in[1],
                                  [lo, hi](double x, double g) { return (x >= lo && x <= hi) ? g : 0.0; }, donor, which);
            }
            case OpKind::MatMul:
                return matmul(node, *in[0], *in[1]);
            case OpKind::CausalConv:
                return conv(node, *in[0], *in[1]);
            case OpKind::ConvWeightGrad:
                return weight_grad(node, *in[0], *in[1]);
            case OpKind::SegmentMax:
                return gather(*in[0], *in[0], a.bins);
            case OpKind::SegmentGather:
                return gather(*in[0], *in[1], a.bins);
            case OpKind::SegmentScatter:
                return scatter(*in[0], *in[1]);
            case OpKind::L2Norm:
                return l2_norm(*in[0]);
            case OpKind::Broadcast:
                return broadcast(node, *in[0]);
            case OpKind::SumTo:
                return sum_to(node, *in[0]);
            case OpKind::ReduceSum:
            case OpKind::ReduceMean: {
                double s = 0.0;
                for (double v : in[0]->values()) s += v;
                if (node.kind() == OpKind::ReduceMean) s /= static_cast<double>(in[0]->size());
                return Array::scalar(s);
            }
            case OpKind::Reshape:
                if (d0 != nullptr) return std::move(*d0).reshaped(node.shape());
                return in[0]->reshaped(node.shape());
            case OpKind::Transpose:
                return transpose(node, *in[0]);
            case OpKind::Concat:
                return concat(node, in);
            case OpKind::Slice:
                return slice(node, *in[0]);
        }
        throw std::logic_error("evaluate: unhandled op " + std::string(op_name(node.kind())));
    }

private:
    bool parallel() const { return backend_ == Backend::Parallel; }

    Array matmul(const Node& node, const Array& lhs, const Array& rhs) const {
        const auto& at = node.attrs();
        kernels::MatmulGeometry g;
        g.rows = node.shape()[0];
        g.cols = node.shape()[1];
        g.inner = at.transpose_a ? lhs.dim(0) : lhs.dim(1);
        g.transpose_a = at.transpose_a;
        g.transpose_b = at.transpose_b;
        Array out(node.shape());
        if (parallel()) {
            kernels::parallel::matmul(lhs.values(), rhs.values(), out.values(), g);
        } else {
            kernels::reference::matmul(lhs.values(), rhs.values(), out.values(), g);
        }
        return out;
    }

    Array conv(const Node& node, const Array& x, const Array& w) const {
        const auto& at = node.attrs();
        kernels::ConvGeometry g;
        g.batch = x.dim(0);
        g.time = x.dim(1);
        g.in_channels = x.dim(2);
        g.out_channels = node.shape()[2];
        g.taps = w.dim(0);
        g.dilation = at.dilation;
        g.direction = at.direction;
        g.transpose_weights = at.transpose_a;
        Array out(node.shape());
        if (parallel()) {
            kernels::parallel::causal_conv(x.values(), w.values(), out.values(), g);
        } else {
            kernels::reference::causal_conv(x.values(), w.values(), out.values(), g);
        }
        return out;
    }

    Array weight_grad(const Node& node, const Array& u, const Array& v) const {
        const auto& at = node.attrs();
        kernels::WeightGradGeometry g;
        g.batch = u.dim(0);
        g.time = u.dim(1);
        g.u_channels = u.dim(2);
        g.v_channels = v.dim(2);
        g.taps = at.taps;
        g.dilation = at.dilation;
        g.direction = at.direction;
        Array out(node.shape());
        if (parallel()) {
            kernels::parallel::conv_weight_grad(u.values(), v.values(), out.values(), g);
        } else {
            kernels::reference::conv_weight_grad(u.values(), v.values(), out.values(), g);
        }
        return out;
    }

    Array gather(const Array& keys, const Array& values, std::size_t bins) const {
        const kernels::SegmentGeometry g{keys.dim(0), keys.dim(1), bins};
        Array out(Shape{g.rows, bins});
        if (parallel()) {
            kernels::parallel::segment_gather(keys.values(), values.values(), out.values(), g);
        } else {
            kernels::reference::segment_gather(keys.values(), values.values(), out.values(), g);
        }
        return out;
    }

    Array scatter(const Array& keys, const Array& grad) const {
        const kernels::SegmentGeometry g{keys.dim(0), keys.dim(1), grad.dim(1)};
        Array out(keys.shape());
        if (parallel()) {
            kernels::parallel::segment_scatter(keys.values(), grad.values(), out.values(), g);
        } else {
            kernels::reference::segment_scatter(keys.values(), grad.values(), out.values(), g);
        }
        return out;
    }

    static Array l2_norm(const Array& x) {
        const std::size_t rows = x.dim(0);
        const std::size_t cols = x.dim(1);
        Array out(Shape{rows});
        for (std::size_t r = 0; r < rows; ++r) {
            double s = 0.0;
            const double* row = x.data() + r * cols;
            for (std::size_t c = 0; c < cols; ++c) s += row[c] * row[c];
            out[r] = std::sqrt(s);
        }
        return out;
    }

    static Array broadcast(const Node& node, const Array& x) {
        Array out(node.shape());
        const std::size_t n = x.size();
        if (node.attrs().align == Align::Leading) {
            const std::size_t rows = out.size() / n;
            Eigen::Map<RowMatrix>(out.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n)).rowwise() =
                Eigen::Map<const Eigen::RowVectorXd>(x.data(), static_cast<Eigen::Index>(n));
        } else {
            const std::size_t repeat = out.size() / n;
            for (std::size_t i = 0; i < n; ++i) std::fill_n(out.data() + i * repeat, repeat, x[i]);
        }
        return out;
    }

    static Array sum_to(const Node& node, const Array& x) {
        Array out(node.shape(), 0.0);
        const std::size_t n = out.size();
        if (node.attrs().align == Align::Leading) {
            for (std::size_t i = 0; i < x.size(); i += n) {
                for (std::size_t j = 0; j < n; ++j) out[j] += x[i + j];
            }
        } else {
            const std::size_t repeat = x.size() / n;
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < repeat; ++j) s += x[i * repeat + j];
                out[i] = s;
            }
        }
        return out;
    }

    static Array transpose(const Node& node, const Array& x) {
        const Shape& s = x.shape();
        const std::size_t rows = s[s.size() - 2];
        const std::size_t cols = s[s.size() - 1];
        const std::size_t blocks = leading_count(s, 2);
        Array out(node.shape());
        const auto r = static_cast<Eigen::Index>(rows);
        const auto c = static_cast<Eigen::Index>(cols);
        for (std::size_t b = 0; b < blocks; ++b) {
            Eigen::Map<RowMatrix>(out.data() + b * rows * cols, c, r) =
                Eigen::Map<const RowMatrix>(x.data() + b * rows * cols, r, c).transpose();
        }
        return out;
    }

    static Array concat(const Node& node, std::span<const Array* const> parts) {
        Array out(node.shape());
        const std::size_t rows = leading_count(node.shape(), 1);
        const std::size_t width = node.shape().back();
        std::size_t offset = 0;
        for (const Array* p : parts) {
            const std::size_t w = p->shape().back();
            for (std::size_t r = 0; r < rows; ++r) std::copy_n(p->data() + r * w, w, out.data() + r * width + offset);
            offset += w;
        }
        return out;
    }

    static Array slice(const Node& node, const Array& x) {
        Array out(node.shape());
        const std::size_t rows = leading_count(x.shape(), 1);
        const std::size_t width = x.shape().back();
        const std::size_t begin = node.attrs().begin;
        const std::size_t w = node.attrs().end - begin;
        for (std::size_t r = 0; r < rows; ++r) std::copy_n(x.data() + r * width + begin, w, out.data() + r * w);
        return out;
    }

    Backend backend_;
};

}  // namespace

std::vector<Array> evaluate(std::span<const Expr> roots, const Bindings& bindings, const EvalOptions& options) {
    const auto order = topological_order(roots);
    std::unordered_map<const Node*, std::size_t> index;
    index.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) index.emplace(order[i], i);

    // Remaining consumers per node; roots are pinned so they survive to the end.
    std::vector<std::size_t> pending(order.size(), 0);
    for (const Node* n : order) {
        for (const auto& in : n->inputs()) ++pending[index.at(in.get())];
    }
    for (const auto& r : roots) ++pending[index.at(r.get())];

    std::vector<Array> owned(order.size());
    std::vector<const Array*> value(order.size(), nullptr);
    const Computer compute(options.backend);
    std::vector<const Array*> args;

    for (std::size_t i = 0; i < order.size(); ++i) {
        const Node& node = *order[i];
        if (node.kind() == OpKind::Leaf) {
            const Array* bound = bindings.find(node.attrs().name);
            if (bound == nullptr) throw UnboundLeafError("evaluate: leaf '" + node.attrs().name + "' is not bound");
            if (bound->shape() != node.shape()) {
                throw ShapeError("evaluate: leaf '" + node.attrs().name + "' declared " + shape_string(node.shape()) +
                                 " but bound to " + shape_string(bound->shape()));
            }
            value[i] = bound;
        } else if (node.kind() == OpKind::Constant) {
            value[i] = node.attrs().constant.get();
        } else {
            args.clear();
            for (const auto& in : node.inputs()) args.push_back(value[index.at(in.get())]);
            Array* donor = nullptr;
            int which = -1;
            const auto& ins = node.inputs();
            for (std::size_t k = 0; k < ins.size() && k < 2 && donor == nullptr; ++k) {
                const std::size_t j = index.at(ins[k].get());
                if (pending[j] == 1 && value[j] == &owned[j]) {
                    donor = &owned[j];
                    which = static_cast<int>(k);
                }
            }
            if (options.profile != nullptr) {
                const auto t0 = std::chrono::steady_clock::now();
                owned[i] = compute(node, args, donor, which);
                const auto k = static_cast<std::size_t>(node.kind());
                options.profile->seconds[k] += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                ++options.profile->calls[k];
            } else {
                owned[i] = compute(node, args, donor, which);
            }
            value[i] = &owned[i];
            for (const auto& in : node.inputs()) {
                const std::size_t j = index.at(in.get());
                if (--pending[j] == 0) {
                    owned[j] = Array();
                    value[j] = nullptr;
                }
            }
        }
    }

    std::vector<Array> results;
    results.reserve(roots.size());
    for (const auto& r : roots) results.push_back(*value[index.at(r.get())]);
    return results;
}

std::string EvalProfile::report() const {
    std::vector<std::size_t> kinds;
    for (std::size_t k = 0; k < kOpKindCount; ++k) {
        if (calls[k] > 0) kinds.push_back(k);
    }
    std::sort(kinds.begin(), kinds.end(), [&](auto a, auto b) { return seconds[a] > seconds[b]; });
    std::ostringstream os;
    for (auto k : kinds) {
        os << op_name(static_cast<OpKind>(k)) << ' ' << seconds[k] << " s, " << calls[k] << " calls\n";
    }
    return os.str();
}

Array evaluate(const Expr& root, const Bindings& bindings, const EvalOptions& options) {
    const Expr roots[] = {root};
    return std::move(evaluate(roots, bindings, options).front());
}

}  // namespace genboot::tensor
