#pragma once

// Dense compute kernels behind the tensor evaluator.
//
// Two implementations share one set of signatures:
//   reference::  straightforward serial loops, kept as a test oracle;
//   parallel::   OpenMP over fixed row blocks, Eigen GEMM inside (convolutions
//                go through a patch matrix so each layer is one large product).
//
// parallel:: partitions work by problem size only (never by thread count) and
// reduces partial sums in a fixed order, so its output is bit-identical for any
// OMP_NUM_THREADS. It is not bit-identical to reference:: (different summation order).

#include <cstddef>
#include <span>

namespace genboot::kernels {

/// y[n, t, :] = sum_k x[n, t - direction * k * dilation, :] @ W_k, zero outside [0, time).
/// Weights are (taps, in_channels, out_channels), or (taps, out_channels, in_channels)
/// used transposed when transpose_weights is set.
struct ConvGeometry {
    std::size_t batch = 1;
    std::size_t time = 1;
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    std::size_t taps = 1;
    std::size_t dilation = 1;
    int direction = 1;
    bool transpose_weights = false;
};

/// out[k] = sum_{n,t} u[n, t - direction * k * dilation, :]^T v[n, t, :], shape (taps, u_channels, v_channels).
struct WeightGradGeometry {
    std::size_t batch = 1;
    std::size_t time = 1;
    std::size_t u_channels = 1;
    std::size_t v_channels = 1;
    std::size_t taps = 1;
    std::size_t dilation = 1;
    int direction = 1;
};

/// c = op(a) @ op(b) with op(a) of shape (rows, inner) and op(b) of shape (inner, cols).
struct MatmulGeometry {
    std::size_t rows = 1;
    std::size_t inner = 1;
    std::size_t cols = 1;
    bool transpose_a = false;
    bool transpose_b = false;
};

/// Each of `rows` rows of length `length` is split into `bins` segments
/// [floor(i*L/B), ceil((i+1)*L/B)); the first maximum of each segment is selected.
struct SegmentGeometry {
    std::size_t rows = 1;
    std::size_t length = 1;
    std::size_t bins = 1;
};

std::size_t segment_begin(std::size_t bin, std::size_t length, std::size_t bins) noexcept;
std::size_t segment_end(std::size_t bin, std::size_t length, std::size_t bins) noexcept;

namespace reference {

void causal_conv(std::span<const double> x, std::span<const double> weights, std::span<double> y,
                 const ConvGeometry& g);
void conv_weight_grad(std::span<const double> u, std::span<const double> v, std::span<double> out,
                      const WeightGradGeometry& g);
void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c, const MatmulGeometry& g);

/// out[r, i] = values[r, argmax of keys over segment i]
void segment_gather(std::span<const double> keys, std::span<const double> values, std::span<double> out,
                    const SegmentGeometry& g);
/// out[r, argmax of keys over segment i] += grad[r, i]; out is overwritten.
void segment_scatter(std::span<const double> keys, std::span<const double> grad, std::span<double> out,
                     const SegmentGeometry& g);

void tanh(std::span<const double> x, std::span<double> y);

}  // namespace reference

namespace parallel {

void causal_conv(std::span<const double> x, std::span<const double> weights, std::span<double> y,
                 const ConvGeometry& g);
void conv_weight_grad(std::span<const double> u, std::span<const double> v, std::span<double> out,
                      const WeightGradGeometry& g);
void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c, const MatmulGeometry& g);
void segment_gather(std::span<const double> keys, std::span<const double> values, std::span<double> out,
                    const SegmentGeometry& g);
void segment_scatter(std::span<const double> keys, std::span<const double> grad, std::span<double> out,
                     const SegmentGeometry& g);

/// Vectorised tanh; relative error below 1e-14 against std::tanh.
void tanh(std::span<const double> x, std::span<double> y);

}  // namespace parallel

}  // namespace genboot::kernels
