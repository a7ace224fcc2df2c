#include "genboot/timeseries/ar1.hpp"

#include "genboot/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

namespace genboot::timeseries {

void Ar1Spec::validate() const {
    if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("ar1: |phi| must be below 1, got " + std::to_string(phi));
    if (!(sigma >= 0.0)) throw std::invalid_argument("ar1: sigma must be nonnegative");
    if (length == 0) throw std::invalid_argument("ar1: length must be positive");
}

SamplePath simulate_ar1(const Ar1Spec& spec, Rng& rng) {
    spec.validate();
    const double y0 = spec.sigma / std::sqrt(1.0 - spec.phi * spec.phi) * standard_normal(rng);
    return simulate_ar1_from(spec, y0, rng);
}

SamplePath simulate_ar1_from(const Ar1Spec& spec, double y0, Rng& rng) {
    spec.validate();
    SamplePath y(spec.length);
    y[0] = y0;
    for (std::size_t t = 1; t < spec.length; ++t) y[t] = spec.phi * y[t - 1] + spec.sigma * standard_normal(rng);
    return y;
}

std::vector<double> acf(std::span<const double> path, std::size_t max_lag) {
    const std::size_t n = path.size();
    if (max_lag >= n) {
        throw std::invalid_argument("acf: max_lag " + std::to_string(max_lag) + " needs a path longer than " +
                                    std::to_string(n));
    }
    double mean = 0.0;
    for (double v : path) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> d(n);
    for (std::size_t t = 0; t < n; ++t) d[t] = path[t] - mean;
    double c0 = 0.0;
    for (double v : d) c0 += v * v;
    if (!(c0 > 0.0)) throw ConstantPathError("acf: path is constant");
    std::vector<double> rho(max_lag + 1);
    rho[0] = 1.0;
    for (std::size_t j = 1; j <= max_lag; ++j) {
        double c = 0.0;
        for (std::size_t t = j; t < n; ++t) c += d[t] * d[t - j];
        rho[j] = c / c0;
    }
    return rho;
}

std::vector<double> pacf_from_acf(std::span<const double> rho, std::size_t max_lag) {
    if (rho.size() <= max_lag) throw std::invalid_argument("pacf: need autocorrelations up to the requested lag");
    std::vector<double> out(max_lag + 1);
    out[0] = 1.0;
    if (max_lag == 0) return out;
    std::vector<double> phi(max_lag + 1, 0.0);
    std::vector<double> prev(max_lag + 1, 0.0);
    phi[1] = rho[1];
    out[1] = rho[1];
    double v = 1.0 - rho[1] * rho[1];
    for (std::size_t k = 2; k <= max_lag; ++k) {
        prev = phi;
        double num = rho[k];
        for (std::size_t j = 1; j < k; ++j) num -= prev[j] * rho[k - j];
        const double a = v > 0.0 ? num / v : 0.0;
        phi[k] = a;
        for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - a * prev[k - j];
        v *= 1.0 - a * a;
        out[k] = a;
    }
    return out;
}

std::vector<double> pacf(std::span<const double> path, std::size_t max_lag) {
    return pacf_from_acf(acf(path, max_lag), max_lag);
}

double ls_estimate(std::span<const double> path, bool intercept) {
    const std::size_t n = path.size();
    if (n < 2) throw std::invalid_argument("ls_estimate: need at least 2 observations");
    if (!intercept) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t t = 1; t < n; ++t) {
            num += path[t] * path[t - 1];
            den += path[t - 1] * path[t - 1];
        }
        if (!(den > 0.0)) throw std::domain_error("ls_estimate: sum of squared lagged values is zero");
        return num / den;
    }
    const double m = static_cast<double>(n - 1);
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        mx += path[t - 1];
        my += path[t];
    }
    mx /= m;
    my /= m;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        sxy += (path[t - 1] - mx) * (path[t] - my);
        sxx += (path[t - 1] - mx) * (path[t - 1] - mx);
    }
    if (!(sxx > 0.0)) throw std::domain_error("ls_estimate: lagged values are constant");
    return sxy / sxx;
}

TheoreticalRefs theoretical_refs(double phi, std::size_t length, std::size_t max_lag) {
    if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("theoretical_refs: |phi| must be below 1");
    if (length == 0) throw std::invalid_argument("theoretical_refs: length must be positive");
    TheoreticalRefs r;
    r.acf.resize(max_lag + 1);
    r.pacf.assign(max_lag + 1, 0.0);
    double p = 1.0;
    for (std::size_t j = 0; j <= max_lag; ++j) {
        r.acf[j] = p;
        p *= phi;
    }
    r.pacf[0] = 1.0;
    if (max_lag >= 1) r.pacf[1] = phi;
    r.sd_phi_hat = std::sqrt((1.0 - phi * phi) / static_cast<double>(length));
    return r;
}

void write_path_csv(std::ostream& out, std::span<const double> path, const std::string& preamble) {
    if (!preamble.empty()) io::write_comment(out, preamble);
    out << "value\n";
    for (double v : path) out << io::format_double(v) << '\n';
}

SamplePath read_path_csv(std::istream& in) {
    SamplePath path;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto comma = line.find(',');
        const std::string cell = comma == std::string::npos ? line : line.substr(0, comma);
        if (!header) {
            if (cell != "value") throw std::invalid_argument("path csv: expected header 'value', got '" + cell + "'");
            header = true;
            continue;
        }
        double v = 0.0;
        const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || end != cell.data() + cell.size()) {
            throw std::invalid_argument("path csv: cannot parse '" + cell + "'");
        }
        path.push_back(v);
    }
    if (path.empty()) throw std::invalid_argument("path csv: no values");
    return path;
}

}  // namespace genboot::timeseries
