#include "genboot/timeseries/correlogram.hpp"

#include "genboot/bootstrap/statistics.hpp"
#include "genboot/io/csv.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace genboot::timeseries {

namespace {

void check_curves(const std::vector<std::vector<double>>& curves) {
    if (curves.empty()) throw std::invalid_argument("correlogram: no curves");
    for (const auto& c : curves) {
        if (c.size() != curves.front().size() || c.empty()) {
            throw std::invalid_argument("correlogram: curves must be non-empty and of equal length");
        }
    }
}

}  // namespace

std::vector<double> mean_curve(const std::vector<std::vector<double>>& curves) {
    check_curves(curves);
    std::vector<double> mean(curves.front().size(), 0.0);
    for (const auto& c : curves) {
        for (std::size_t j = 0; j < c.size(); ++j) mean[j] += c[j];
    }
    for (auto& v : mean) v /= static_cast<double>(curves.size());
    return mean;
}

CorrelogramStats correlogram_stats(const std::vector<std::vector<double>>& curves) {
    CorrelogramStats s;
    s.mean = mean_curve(curves);
    s.replications = curves.size();
    const std::size_t lags = s.mean.size();
    std::vector<double> column(curves.size());
    for (std::size_t j = 0; j < lags; ++j) {
        for (std::size_t r = 0; r < curves.size(); ++r) column[r] = curves[r][j];
        std::sort(column.begin(), column.end());
        s.q25.push_back(bootstrap::empirical_quantile(column, 0.25));
        s.q75.push_back(bootstrap::empirical_quantile(column, 0.75));
    }
    return s;
}

void write_correlogram_csv(std::ostream& out, const CorrelogramStats& stats, const std::string& preamble) {
    if (!preamble.empty()) io::write_comment(out, preamble);
    out << "lag,mean,q25,q75\n";
    for (std::size_t j = 0; j < stats.mean.size(); ++j) {
        io::write_row(out, {std::to_string(j), io::format_double(stats.mean[j]), io::format_double(stats.q25[j]),
                            io::format_double(stats.q75[j])});
    }
}

}  // namespace genboot::timeseries
