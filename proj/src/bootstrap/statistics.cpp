#include "genboot/bootstrap/statistics.hpp"

#include "genboot/io/csv.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace genboot::bootstrap {

double empirical_quantile(std::span<const double> sorted, double prob) {
    if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
    if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("quantile probability outside [0, 1]");
    const double h = prob * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return frac == 0.0 ? sorted[lo] : sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

const Interval& BootstrapResult::interval(double level) const {
    for (const auto& i : intervals) {
        if (std::abs(i.level - level) < 1e-12) return i;
    }
    throw std::out_of_range("no interval at level " + std::to_string(level));
}

BootstrapResult gb_statistics(std::vector<double> estimates, std::span<const double> levels) {
    if (estimates.empty()) throw std::invalid_argument("gb_statistics: no estimates");
    for (double l : levels) {
        if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("gb_statistics: levels must lie in (0, 1)");
    }
    BootstrapResult r;
    const double m = static_cast<double>(estimates.size());
    double sum = 0.0;
    for (double e : estimates) sum += e;
    r.mean = sum / m;
    double ss = 0.0;
    for (double e : estimates) ss += (e - r.mean) * (e - r.mean);
    r.variance = ss / m;

    std::vector<double> sorted = estimates;
    std::sort(sorted.begin(), sorted.end());
    for (double level : levels) {
        const double alpha = 1.0 - level;
        r.intervals.push_back({level, empirical_quantile(sorted, alpha / 2.0), empirical_quantile(sorted, 1.0 - alpha / 2.0)});
    }
    r.estimates = std::move(estimates);
    return r;
}

void write_estimates_csv(std::ostream& out, const BootstrapResult& result, const std::string& preamble) {
    if (!preamble.empty()) io::write_comment(out, preamble);
    io::write_row(out, {"sample_index", "estimate"});
    for (std::size_t i = 0; i < result.estimates.size(); ++i) {
        io::write_row(out, {std::to_string(i), io::format_double(result.estimates[i])});
    }
}

void write_summary_csv(std::ostream& out, const BootstrapResult& result, const std::string& preamble) {
    if (!preamble.empty()) io::write_comment(out, preamble);
    io::write_row(out, {"level", "lower", "upper", "mean", "variance"});
    for (const auto& i : result.intervals) {
        io::write_row(out, {io::format_double(i.level), io::format_double(i.lower), io::format_double(i.upper),
                            io::format_double(result.mean), io::format_double(result.variance)});
    }
}

}  // namespace genboot::bootstrap
