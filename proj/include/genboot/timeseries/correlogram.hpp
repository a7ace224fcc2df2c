#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace genboot::timeseries {

/// Per-lag mean and interquartile range of ACF or PACF curves across
/// replications. Lags run 0..max_lag.
struct CorrelogramStats {
    std::vector<double> mean;
    std::vector<double> q25;
    std::vector<double> q75;
    std::size_t replications = 0;

    std::size_t max_lag() const noexcept { return mean.empty() ? 0 : mean.size() - 1; }
};

/// `curves` holds one curve per replication, all of the same length.
/// Quantiles use the bootstrap module's interpolation rule.
CorrelogramStats correlogram_stats(const std::vector<std::vector<double>>& curves);

/// Elementwise mean of equal-length curves.
std::vector<double> mean_curve(const std::vector<std::vector<double>>& curves);

/// lag,mean,q25,q75
void write_correlogram_csv(std::ostream& out, const CorrelogramStats& stats, const std::string& preamble = {});

}  // namespace genboot::timeseries
