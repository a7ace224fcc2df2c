#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace genboot::bootstrap {

/// Linear interpolation between order statistics at positions (i - 1) / (m - 1)
/// of the sorted sample, i = 1..m.
double empirical_quantile(std::span<const double> sorted, double prob);

struct Interval {
    double level = 0.0;  // nominal confidence level 1 - alpha
    double lower = 0.0;
    double upper = 0.0;

    bool contains(double x) const noexcept { return lower <= x && x <= upper; }
    double length() const noexcept { return upper - lower; }
};

struct BootstrapResult {
    std::vector<double> estimates;
    double mean = 0.0;
    double variance = 0.0;  // (1/m) sum (estimate_i - mean)^2
    std::vector<Interval> intervals;

    const Interval& interval(double level) const;
};

inline const std::vector<double> kDefaultLevels{0.99, 0.95, 0.90, 0.80};

/// Percentile intervals at each confidence level 1 - alpha: the alpha/2 and
/// 1 - alpha/2 empirical quantiles.
BootstrapResult gb_statistics(std::vector<double> estimates, std::span<const double> levels = kDefaultLevels);

/// sample_index,estimate
void write_estimates_csv(std::ostream& out, const BootstrapResult& result, const std::string& preamble = {});
/// level,lower,upper,mean,variance
void write_summary_csv(std::ostream& out, const BootstrapResult& result, const std::string& preamble = {});

}  // namespace genboot::bootstrap
