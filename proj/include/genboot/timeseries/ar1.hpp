#pragma once

#include "genboot/rng.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace genboot::timeseries {

using SamplePath = std::vector<double>;

/// y_t = phi * y_{t-1} + e_t, e_t ~ N(0, sigma^2).
struct Ar1Spec {
    double phi = 0.5;
    double sigma = 1.0;
    std::size_t length = 1000;

    void validate() const;
};

/// Stationary path: y_0 ~ N(0, sigma^2 / (1 - phi^2)), no burn-in.
SamplePath simulate_ar1(const Ar1Spec& spec, Rng& rng);

/// Same recursion from a fixed y_0.
SamplePath simulate_ar1_from(const Ar1Spec& spec, double y0, Rng& rng);

class ConstantPathError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Sample autocorrelations for lags 0..max_lag with the divisor-T covariance,
/// so result[0] == 1.
std::vector<double> acf(std::span<const double> path, std::size_t max_lag);

/// Partial autocorrelations for lags 0..max_lag (result[0] == 1) from the
/// sample ACF by the Durbin-Levinson recursion.
std::vector<double> pacf(std::span<const double> path, std::size_t max_lag);
std::vector<double> pacf_from_acf(std::span<const double> rho, std::size_t max_lag);

/// sum y_t y_{t-1} / sum y_{t-1}^2 over t = 2..T. With `intercept`, the slope
/// of the regression of y_t on (1, y_{t-1}).
double ls_estimate(std::span<const double> path, bool intercept = false);

struct TheoreticalRefs {
    std::vector<double> acf;   // phi^j, j = 0..max_lag
    std::vector<double> pacf;  // 1, phi, 0, 0, ...
    double sd_phi_hat = 0.0;   // sqrt((1 - phi^2) / T)
};

TheoreticalRefs theoretical_refs(double phi, std::size_t length, std::size_t max_lag);

/// Single-column CSV with header "value", preceded by `preamble` as # comments.
void write_path_csv(std::ostream& out, std::span<const double> path, const std::string& preamble = {});
SamplePath read_path_csv(std::istream& in);

}  // namespace genboot::timeseries
