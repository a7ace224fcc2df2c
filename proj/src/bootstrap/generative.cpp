#include "genboot/bootstrap/generative.hpp"

#include "genboot/tensor/evaluate.hpp"
#include "parallel_map.hpp"

#include <algorithm>
#include <stdexcept>

namespace genboot::bootstrap {

namespace {

// Samples per generator evaluation. Fixed so results do not depend on the thread count.
constexpr std::size_t kChunk = 16;

}  // namespace

std::vector<std::vector<double>> gb_sample(const gan::Generator& generator, const nn::NetworkParams& params,
                                           std::size_t b2, std::size_t m, const StreamFamily& streams) {
    if (b2 == 0) throw std::invalid_argument("gb_sample: sample length must be positive");
    std::vector<std::vector<double>> paths(m);
    if (m == 0) return paths;
    const std::size_t rows = b2 + generator.receptive_field();
    const std::size_t nd = generator.arch().noise_dim;
    const std::size_t block = rows * nd;

    for (std::size_t first = 0; first < m; first += kChunk) {
        const std::size_t n = std::min(kChunk, m - first);
        tensor::Array noise({n, rows, nd});
        detail::parallel_for_indexed(n, "gb sample", [&](std::size_t k) {
            Rng rng = streams.at(first + k);
            fill_standard_normal(rng, noise.values().subspan(k * block, block));
        });
        const tensor::Expr z = tensor::leaf("noise", noise.shape());
        tensor::Bindings b;
        params.bind(b);
        b.set("noise", noise);
        const tensor::Array y = tensor::evaluate(generator.build(z), b);
        for (std::size_t k = 0; k < n; ++k) paths[first + k].assign(y.data() + k * b2, y.data() + (k + 1) * b2);
    }
    return paths;
}

BootstrapResult gb_bootstrap(const gan::Generator& generator, const nn::NetworkParams& params, std::size_t b2,
                             std::size_t m, const Statistic& statistic, std::span<const double> levels,
                             const StreamFamily& streams) {
    const auto paths = gb_sample(generator, params, b2, m, streams);
    std::vector<double> estimates(m);
    detail::parallel_for_indexed(m, "generated sample", [&](std::size_t i) { estimates[i] = statistic(paths[i]); });
    return gb_statistics(std::move(estimates), levels);
}

}  // namespace genboot::bootstrap
