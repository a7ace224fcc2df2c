#include "genboot/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace genboot::kernels {

std::size_t segment_begin(std::size_t bin, std::size_t length, std::size_t bins) noexcept {
    return (bin * length) / bins;
}

std::size_t segment_end(std::size_t bin, std::size_t length, std::size_t bins) noexcept {
    return ((bin + 1) * length + bins - 1) / bins;
}

namespace reference {

namespace {

long shifted_index(std::size_t t, std::size_t k, const std::size_t dilation, int direction) {
    return static_cast<long>(t) - direction * static_cast<long>(k * dilation);
}

std::size_t segment_argmax(const double* row, std::size_t begin, std::size_t end) {
    std::size_t best = begin;
    for (std::size_t j = begin + 1; j < end; ++j) {
        if (row[j] > row[best]) best = j;
    }
    return best;
}

}  // namespace

void causal_conv(std::span<const double> x, std::span<const double> weights, std::span<double> y,
                 const ConvGeometry& g) {
    const std::size_t cin = g.in_channels;
    const std::size_t cout = g.out_channels;
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t n = 0; n < g.batch; ++n) {
        for (std::size_t t = 0; t < g.time; ++t) {
            double* out = y.data() + (n * g.time + t) * cout;
            for (std::size_t k = 0; k < g.taps; ++k) {
                const long s = shifted_index(t, k, g.dilation, g.direction);
                if (s < 0 || s >= static_cast<long>(g.time)) continue;
                const double* in = x.data() + (n * g.time + static_cast<std::size_t>(s)) * cin;
                const double* w = weights.data() + k * cin * cout;
                for (std::size_t c = 0; c < cin; ++c) {
                    for (std::size_t o = 0; o < cout; ++o) {
                        const double wv = g.transpose_weights ? w[o * cin + c] : w[c * cout + o];
                        out[o] += in[c] * wv;
                    }
                }
            }
        }
    }
}

void conv_weight_grad(std::span<const double> u, std::span<const double> v, std::span<double> out,
                      const WeightGradGeometry& g) {
    const std::size_t cu = g.u_channels;
    const std::size_t cv = g.v_channels;
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 0; k < g.taps; ++k) {
        double* block = out.data() + k * cu * cv;
        for (std::size_t n = 0; n < g.batch; ++n) {
            for (std::size_t t = 0; t < g.time; ++t) {
                const long s = shifted_index(t, k, g.dilation, g.direction);
                if (s < 0 || s >= static_cast<long>(g.time)) continue;
                const double* ur = u.data() + (n * g.time + static_cast<std::size_t>(s)) * cu;
                const double* vr = v.data() + (n * g.time + t) * cv;
                for (std::size_t a = 0; a < cu; ++a) {
                    for (std::size_t b = 0; b < cv; ++b) block[a * cv + b] += ur[a] * vr[b];
                }
            }
        }
    }
}

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c, const MatmulGeometry& g) {
    for (std::size_t i = 0; i < g.rows; ++i) {
        for (std::size_t j = 0; j < g.cols; ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < g.inner; ++p) {
                const double av = g.transpose_a ? a[p * g.rows + i] : a[i * g.inner + p];
                const double bv = g.transpose_b ? b[j * g.inner + p] : b[p * g.cols + j];
                acc += av * bv;
            }
            c[i * g.cols + j] = acc;
        }
    }
}

void segment_gather(std::span<const double> keys, std::span<const double> values, std::span<double> out,
                    const SegmentGeometry& g) {
    for (std::size_t r = 0; r < g.rows; ++r) {
        const double* row = keys.data() + r * g.length;
        for (std::size_t i = 0; i < g.bins; ++i) {
            const std::size_t j =
                segment_argmax(row, segment_begin(i, g.length, g.bins), segment_end(i, g.length, g.bins));
            out[r * g.bins + i] = values[r * g.length + j];
        }
    }
}

void segment_scatter(std::span<const double> keys, std::span<const double> grad, std::span<double> out,
                     const SegmentGeometry& g) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t r = 0; r < g.rows; ++r) {
        const double* row = keys.data() + r * g.length;
        for (std::size_t i = 0; i < g.bins; ++i) {
            const std::size_t j =
                segment_argmax(row, segment_begin(i, g.length, g.bins), segment_end(i, g.length, g.bins));
            out[r * g.length + j] += grad[r * g.bins + i];
        }
    }
}

void tanh(std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::tanh(x[i]);
}

}  // namespace reference
}  // namespace genboot::kernels
