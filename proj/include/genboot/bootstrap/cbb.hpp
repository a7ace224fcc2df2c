#pragma once

#include "genboot/bootstrap/statistics.hpp"
#include "genboot/rng.hpp"

#include <functional>
#include <span>
#include <vector>

namespace genboot::bootstrap {

using Statistic = std::function<double(std::span<const double>)>;

/// Circular block bootstrap: ceil(T/b) blocks of length b with uniform starts
/// in [0, T), read with wrap-around, concatenated and truncated to T.
std::vector<double> cbb_resample(std::span<const double> path, std::size_t block_length, Rng& rng);

/// The same construction from given block starts.
std::vector<double> cbb_resample_from_starts(std::span<const double> path, std::size_t block_length,
                                             std::span<const std::size_t> starts);

/// m resamples, resample i drawn from streams.at(i), so the result does not
/// depend on the number of threads. A statistic failure is rethrown as
/// std::runtime_error naming the resample index.
BootstrapResult cbb_bootstrap(std::span<const double> path, std::size_t block_length, const Statistic& statistic,
                              std::size_t m, std::span<const double> levels, const StreamFamily& streams);

}  // namespace genboot::bootstrap
