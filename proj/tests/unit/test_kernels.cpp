#include "doctest.h"

#include "genboot/kernels/kernels.hpp"

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <cmath>
#include <omp.h>
#include <vector>

using namespace genboot::kernels;

namespace {

std::vector<double> randn(std::size_t n, boost::random::mt19937_64& rng) {
    boost::random::normal_distribution<double> nd;
    std::vector<double> v(n);
    for (auto& x : v) x = nd(rng);
    return v;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::abs(a[i] - b[i]) <= tol * std::max(1.0, std::abs(b[i])));
    }
}

template <class F>
std::vector<double> with_threads(int threads, F f) {
    const int saved = omp_get_max_threads();
    omp_set_num_threads(threads);
    auto out = f();
    omp_set_num_threads(saved);
    return out;
}

}  // namespace

TEST_CASE("segment bounds cover the row with near-equal lengths") {
    CHECK(segment_begin(0, 4, 2) == 0);
    CHECK(segment_end(0, 4, 2) == 2);
    CHECK(segment_begin(1, 4, 2) == 2);
    CHECK(segment_end(1, 4, 2) == 4);
    for (std::size_t length = 1; length < 60; ++length) {
        for (std::size_t bins = 1; bins <= length; ++bins) {
            std::size_t shortest = length;
            std::size_t longest = 0;
            CHECK(segment_begin(0, length, bins) == 0);
            CHECK(segment_end(bins - 1, length, bins) == length);
            for (std::size_t i = 0; i < bins; ++i) {
                const std::size_t len = segment_end(i, length, bins) - segment_begin(i, length, bins);
                shortest = std::min(shortest, len);
                longest = std::max(longest, len);
                if (i > 0) CHECK(segment_begin(i, length, bins) <= segment_end(i - 1, length, bins));
            }
            CHECK(shortest >= 1);
            CHECK(longest - shortest <= 1);
        }
    }
}

TEST_CASE("parallel kernels agree with the serial reference") {
    boost::random::mt19937_64 rng(42);
    boost::random::uniform_int_distribution<std::size_t> small(1, 9);

    for (int trial = 0; trial < 30; ++trial) {
        ConvGeometry g;
        g.batch = small(rng);
        g.time = small(rng) * 3;
        g.in_channels = small(rng);
        g.out_channels = small(rng);
        g.taps = 1 + trial % 3;
        g.dilation = 1 + trial % 4;
        g.direction = trial % 2 == 0 ? 1 : -1;
        g.transpose_weights = trial % 3 == 0;
        auto x = randn(g.batch * g.time * g.in_channels, rng);
        auto w = randn(g.taps * g.in_channels * g.out_channels, rng);
        std::vector<double> yp(g.batch * g.time * g.out_channels);
        std::vector<double> yr(yp.size());
        parallel::causal_conv(x, w, yp, g);
        reference::causal_conv(x, w, yr, g);
        check_close(yp, yr, 1e-12);

        WeightGradGeometry wg{g.batch, g.time, g.in_channels, g.out_channels, g.taps, g.dilation, g.direction};
        auto v = randn(g.batch * g.time * g.out_channels, rng);
        std::vector<double> op(g.taps * g.in_channels * g.out_channels);
        std::vector<double> orf(op.size());
        parallel::conv_weight_grad(x, v, op, wg);
        reference::conv_weight_grad(x, v, orf, wg);
        check_close(op, orf, 1e-12);

        MatmulGeometry mg{small(rng) * 40, small(rng), small(rng), trial % 2 == 1, trial % 4 >= 2};
        auto a = randn(mg.rows * mg.inner, rng);
        auto b = randn(mg.inner * mg.cols, rng);
        std::vector<double> cp(mg.rows * mg.cols);
        std::vector<double> cr(cp.size());
        parallel::matmul(a, b, cp, mg);
        reference::matmul(a, b, cr, mg);
        check_close(cp, cr, 1e-12);

        SegmentGeometry sg{small(rng), 16 + small(rng), 1 + small(rng)};
        auto keys = randn(sg.rows * sg.length, rng);
        auto vals = randn(sg.rows * sg.length, rng);
        auto grad = randn(sg.rows * sg.bins, rng);
        std::vector<double> gp(sg.rows * sg.bins);
        std::vector<double> gr(gp.size());
        parallel::segment_gather(keys, vals, gp, sg);
        reference::segment_gather(keys, vals, gr, sg);
        CHECK(gp == gr);
        std::vector<double> sp(sg.rows * sg.length);
        std::vector<double> sr(sp.size());
        parallel::segment_scatter(keys, grad, sp, sg);
        reference::segment_scatter(keys, grad, sr, sg);
        CHECK(sp == sr);
    }
}

TEST_CASE("parallel kernels are bit-identical for any thread count") {
    boost::random::mt19937_64 rng(9);
    ConvGeometry g{13, 57, 6, 11, 2, 4, 1, false};
    auto x = randn(g.batch * g.time * g.in_channels, rng);
    auto w = randn(g.taps * g.in_channels * g.out_channels, rng);
    auto v = randn(g.batch * g.time * g.out_channels, rng);
    WeightGradGeometry wg{g.batch, g.time, g.in_channels, g.out_channels, g.taps, g.dilation, g.direction};
    MatmulGeometry mg{700, 37, 19, false, true};
    auto a = randn(mg.rows * mg.inner, rng);
    auto b = randn(mg.inner * mg.cols, rng);
    auto t = randn(5000, rng);

    auto run = [&] {
        std::vector<double> all;
        std::vector<double> y(g.batch * g.time * g.out_channels);
        parallel::causal_conv(x, w, y, g);
        all.insert(all.end(), y.begin(), y.end());
        std::vector<double> dw(g.taps * g.in_channels * g.out_channels);
        parallel::conv_weight_grad(x, v, dw, wg);
        all.insert(all.end(), dw.begin(), dw.end());
        std::vector<double> c(mg.rows * mg.cols);
        parallel::matmul(a, b, c, mg);
        all.insert(all.end(), c.begin(), c.end());
        std::vector<double> th(t.size());
        parallel::tanh(t, th);
        all.insert(all.end(), th.begin(), th.end());
        return all;
    };
    const auto one = with_threads(1, run);
    const auto four = with_threads(4, run);
    const auto seven = with_threads(7, run);
    CHECK(one == four);
    CHECK(one == seven);
}

TEST_CASE("vectorised tanh tracks std::tanh") {
    std::vector<double> x;
    for (int e = -12; e <= 2; ++e) {
        for (int m = 1; m < 100; ++m) {
            const double v = m * 0.01 * std::pow(10.0, e);
            x.push_back(v);
            x.push_back(-v);
        }
    }
    x.push_back(0.0);
    x.push_back(1000.0);
    x.push_back(-1000.0);
    std::vector<double> y(x.size());
    parallel::tanh(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double ref = std::tanh(x[i]);
        const double err = ref == 0.0 ? std::abs(y[i]) : std::abs(y[i] - ref) / std::abs(ref);
        CHECK(err <= 1e-14);
    }
}
