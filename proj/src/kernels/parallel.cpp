#include "genboot/kernels/kernels.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace genboot::kernels::parallel {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using MutMap = Eigen::Map<RowMatrix>;

// Fixed partition sizes. Changing them changes rounding, not correctness.
constexpr std::size_t kMatmulRowBlock = 128;
constexpr std::size_t kWeightGradChunks = 8;
constexpr std::size_t kTanhBlock = 256;

constexpr std::size_t kConvRowBlock = 128;

// Rows [r0, r0 + rows) of the (batch * time, taps * channels) patch matrix:
// row (n, t), column block k holds x[n, t - direction * k * dilation, :], or zeros
// where that step falls outside the sample.
void fill_patches(const double* x, std::size_t time, std::size_t channels, std::size_t taps, std::size_t dilation,
                  int direction, std::size_t r0, std::size_t rows, double* panel) {
    const std::size_t width = taps * channels;
    for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t r = r0 + i;
        const std::size_t n = r / time;
        const auto t = static_cast<long>(r % time);
        double* dst = panel + i * width;
        for (std::size_t k = 0; k < taps; ++k) {
            const long src = t - direction * static_cast<long>(k * dilation);
            if (src < 0 || src >= static_cast<long>(time)) {
                std::fill_n(dst + k * channels, channels, 0.0);
            } else {
                std::copy_n(x + (n * time + static_cast<std::size_t>(src)) * channels, channels, dst + k * channels);
            }
        }
    }
}

std::size_t argmax_in(const double* row, std::size_t begin, std::size_t end) {
    std::size_t best = begin;
    for (std::size_t j = begin + 1; j < end; ++j) {
        if (row[j] > row[best]) best = j;
    }
    return best;
}

}  // namespace

void causal_conv(std::span<const double> x, std::span<const double> weights, std::span<double> y,
                 const ConvGeometry& g) {
    const std::size_t width = g.taps * g.in_channels;
    // (taps * in, out) weight matrix; the untransposed layout already is one.
    std::vector<double> flipped;
    const double* wmat = weights.data();
    if (g.transpose_weights) {
        flipped.resize(width * g.out_channels);
        for (std::size_t k = 0; k < g.taps; ++k)
            for (std::size_t o = 0; o < g.out_channels; ++o)
                for (std::size_t c = 0; c < g.in_channels; ++c)
                    flipped[(k * g.in_channels + c) * g.out_channels + o] =
                        weights[(k * g.out_channels + o) * g.in_channels + c];
        wmat = flipped.data();
    }
    const ConstMap w(wmat, width, g.out_channels);
    const std::size_t total = g.batch * g.time;
    const std::size_t blocks = (total + kConvRowBlock - 1) / kConvRowBlock;

#pragma omp parallel
    {
        std::vector<double> panel(kConvRowBlock * width);
#pragma omp for schedule(static)
        for (long b = 0; b < static_cast<long>(blocks); ++b) {
            const std::size_t r0 = static_cast<std::size_t>(b) * kConvRowBlock;
            const std::size_t rows = std::min(kConvRowBlock, total - r0);
            fill_patches(x.data(), g.time, g.in_channels, g.taps, g.dilation, g.direction, r0, rows, panel.data());
            MutMap(y.data() + r0 * g.out_channels, rows, g.out_channels).noalias() =
                ConstMap(panel.data(), rows, width) * w;
        }
    }
}

void conv_weight_grad(std::span<const double> u, std::span<const double> v, std::span<double> out,
                      const WeightGradGeometry& g) {
    const std::size_t width = g.taps * g.u_channels;
    const std::size_t result = width * g.v_channels;
    const std::size_t total = g.batch * g.time;
    const std::size_t blocks = (total + kConvRowBlock - 1) / kConvRowBlock;
    const std::size_t chunks = std::max<std::size_t>(1, std::min(blocks, kWeightGradChunks));
    const std::size_t per_chunk = (blocks + chunks - 1) / chunks;
    std::vector<double> partial(chunks * result, 0.0);

#pragma omp parallel
    {
        std::vector<double> panel(kConvRowBlock * width);
#pragma omp for schedule(static)
        for (long c = 0; c < static_cast<long>(chunks); ++c) {
            MutMap acc(partial.data() + static_cast<std::size_t>(c) * result, width, g.v_channels);
            const std::size_t b_end = std::min(blocks, (static_cast<std::size_t>(c) + 1) * per_chunk);
            for (std::size_t b = static_cast<std::size_t>(c) * per_chunk; b < b_end; ++b) {
                const std::size_t r0 = b * kConvRowBlock;
                const std::size_t rows = std::min(kConvRowBlock, total - r0);
                fill_patches(u.data(), g.time, g.u_channels, g.taps, g.dilation, g.direction, r0, rows,
                             panel.data());
                acc.noalias() += ConstMap(panel.data(), rows, width).transpose() *
                                 ConstMap(v.data() + r0 * g.v_channels, rows, g.v_channels);
            }
        }
    }

    std::copy_n(partial.begin(), result, out.begin());
    for (std::size_t c = 1; c < chunks; ++c) {
        const double* src = partial.data() + c * result;
        for (std::size_t i = 0; i < result; ++i) out[i] += src[i];
    }
}

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c, const MatmulGeometry& g) {
    const std::size_t blocks = (g.rows + kMatmulRowBlock - 1) / kMatmulRowBlock;
    ConstMap bmat(b.data(), g.transpose_b ? g.cols : g.inner, g.transpose_b ? g.inner : g.cols);
    MutMap cmat(c.data(), g.rows, g.cols);

#pragma omp parallel for schedule(static)
    for (long blk = 0; blk < static_cast<long>(blocks); ++blk) {
        const auto r0 = static_cast<Eigen::Index>(blk * kMatmulRowBlock);
        const auto nr = static_cast<Eigen::Index>(std::min(kMatmulRowBlock, g.rows - r0));
        auto dst = cmat.middleRows(r0, nr);
        if (g.transpose_a) {
            ConstMap amat(a.data(), g.inner, g.rows);
            if (g.transpose_b) {
                dst.noalias() = amat.middleCols(r0, nr).transpose() * bmat.transpose();
            } else {
                dst.noalias() = amat.middleCols(r0, nr).transpose() * bmat;
            }
        } else {
            ConstMap amat(a.data(), g.rows, g.inner);
            if (g.transpose_b) {
                dst.noalias() = amat.middleRows(r0, nr) * bmat.transpose();
            } else {
                dst.noalias() = amat.middleRows(r0, nr) * bmat;
            }
        }
    }
}

void segment_gather(std::span<const double> keys, std::span<const double> values, std::span<double> out,
                    const SegmentGeometry& g) {
#pragma omp parallel for schedule(static)
    for (long r = 0; r < static_cast<long>(g.rows); ++r) {
        const double* row = keys.data() + r * g.length;
        for (std::size_t i = 0; i < g.bins; ++i) {
            const std::size_t j =
                argmax_in(row, segment_begin(i, g.length, g.bins), segment_end(i, g.length, g.bins));
            out[r * g.bins + i] = values[r * g.length + j];
        }
    }
}

void segment_scatter(std::span<const double> keys, std::span<const double> grad, std::span<double> out,
                     const SegmentGeometry& g) {
#pragma omp parallel for schedule(static)
    for (long r = 0; r < static_cast<long>(g.rows); ++r) {
        const double* row = keys.data() + r * g.length;
        double* dst = out.data() + r * g.length;
        std::fill(dst, dst + g.length, 0.0);
        for (std::size_t i = 0; i < g.bins; ++i) {
            const std::size_t j =
                argmax_in(row, segment_begin(i, g.length, g.bins), segment_end(i, g.length, g.bins));
            dst[j] += grad[r * g.bins + i];
        }
    }
}

namespace {

using TanhBlock = Eigen::Array<double, kTanhBlock, 1>;

// Small |x| uses the odd Taylor series through x^13; elsewhere 1 - 2 / (exp(2|x|) + 1).
TanhBlock tanh_block(const TanhBlock& v) {
    const TanhBlock a = v.abs().min(40.0);
    const TanhBlock far = 1.0 - 2.0 / ((2.0 * a).exp() + 1.0);
    const TanhBlock v2 = v * v;
    const TanhBlock near =
        v * (1.0 + v2 * (-1.0 / 3 + v2 * (2.0 / 15 + v2 * (-17.0 / 315 + v2 * (62.0 / 2835 +
             v2 * (-1382.0 / 155925 + v2 * (21844.0 / 6081075)))))));
    return (a < 0.0625).select(near, (v < 0.0).select(-far, far));
}

}  // namespace

void tanh(std::span<const double> x, std::span<double> y) {
    const std::size_t full = x.size() / kTanhBlock;
#pragma omp parallel for schedule(static)
    for (long b = 0; b < static_cast<long>(full); ++b) {
        Eigen::Map<TanhBlock>(y.data() + b * kTanhBlock) = tanh_block(Eigen::Map<const TanhBlock>(x.data() + b * kTanhBlock));
    }
    // The tail goes through the same formula so every element is computed identically.
    const std::size_t rest = x.size() - full * kTanhBlock;
    if (rest > 0) {
        TanhBlock tail = TanhBlock::Zero();
        std::copy_n(x.data() + full * kTanhBlock, rest, tail.data());
        const TanhBlock out = tanh_block(tail);
        std::copy_n(out.data(), rest, y.data() + full * kTanhBlock);
    }
}

}  // namespace genboot::kernels::parallel
