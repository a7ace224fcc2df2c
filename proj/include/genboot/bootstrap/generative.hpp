#pragma once

#include "genboot/bootstrap/cbb.hpp"
#include "genboot/gan/networks.hpp"

#include <vector>

namespace genboot::bootstrap {

/// m generated paths of length b2. Path i is driven by a (b2 + p, noise_dim)
/// standard normal noise block drawn from streams.at(i).
std::vector<std::vector<double>> gb_sample(const gan::Generator& generator, const nn::NetworkParams& params,
                                           std::size_t b2, std::size_t m, const StreamFamily& streams);

/// gb_sample followed by `statistic` on every path and gb_statistics.
BootstrapResult gb_bootstrap(const gan::Generator& generator, const nn::NetworkParams& params, std::size_t b2,
                             std::size_t m, const Statistic& statistic, std::span<const double> levels,
                             const StreamFamily& streams);

}  // namespace genboot::bootstrap
