#include "genboot/bootstrap/cbb.hpp"

#include "parallel_map.hpp"

#include <stdexcept>
#include <string>

namespace genboot::bootstrap {

namespace {

void check_block(std::span<const double> path, std::size_t b) {
    if (path.empty()) throw std::invalid_argument("cbb: empty path");
    if (b == 0 || b > path.size()) {
        throw std::invalid_argument("cbb: block length " + std::to_string(b) + " must be in [1, " +
                                    std::to_string(path.size()) + "]");
    }
}

}  // namespace

std::vector<double> cbb_resample_from_starts(std::span<const double> path, std::size_t block_length,
                                             std::span<const std::size_t> starts) {
    check_block(path, block_length);
    const std::size_t T = path.size();
    const std::size_t blocks = (T + block_length - 1) / block_length;
    if (starts.size() != blocks) {
        throw std::invalid_argument("cbb: expected " + std::to_string(blocks) + " block starts, got " +
                                    std::to_string(starts.size()));
    }
    std::vector<double> out;
    out.reserve(T);
    for (std::size_t k = 0; k < blocks && out.size() < T; ++k) {
        if (starts[k] >= T) throw std::invalid_argument("cbb: block start out of range");
        for (std::size_t i = 0; i < block_length && out.size() < T; ++i) out.push_back(path[(starts[k] + i) % T]);
    }
    return out;
}

std::vector<double> cbb_resample(std::span<const double> path, std::size_t block_length, Rng& rng) {
    check_block(path, block_length);
    const std::size_t T = path.size();
    std::vector<std::size_t> starts((T + block_length - 1) / block_length);
    for (auto& s : starts) s = uniform_index(rng, T);
    return cbb_resample_from_starts(path, block_length, starts);
}

BootstrapResult cbb_bootstrap(std::span<const double> path, std::size_t block_length, const Statistic& statistic,
                              std::size_t m, std::span<const double> levels, const StreamFamily& streams) {
    check_block(path, block_length);
    std::vector<double> estimates(m);
    detail::parallel_for_indexed(m, "cbb resample", [&](std::size_t i) {
        Rng rng = streams.at(i);
        const auto resample = cbb_resample(path, block_length, rng);
        estimates[i] = statistic(resample);
    });
    return gb_statistics(std::move(estimates), levels);
}

}  // namespace genboot::bootstrap
