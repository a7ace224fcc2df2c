#pragma once

// Central finite differences over every element of every leaf, used as the
// independent oracle for analytic gradients. Elements where the forward and
// backward one-sided slopes disagree straddle a kink (activation hinge,
// max-pool switch); for those the analytic value is compared against the
// closer one-sided slope and reported separately.

#include "genboot/tensor/autodiff.hpp"
#include "genboot/tensor/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace genboot::testing {

struct FdReport {
    double max_rel_smooth = 0.0;
    double max_rel_kink = 0.0;
    std::size_t checked = 0;
    std::size_t kinks = 0;
};

using LeafValues = std::map<std::string, tensor::Array>;

inline tensor::Bindings bind_all(const LeafValues& values) {
    tensor::Bindings b;
    for (const auto& [name, v] : values) b.set(name, v);
    return b;
}

inline double eval_scalar(const tensor::Expr& root, const LeafValues& values) {
    return tensor::evaluate(root, bind_all(values)).item();
}

/// Relative error max(0, |a - n| - noise) / max(|a|, |n|, floor), where
///   noise = 16 ulps of the largest |f| seen, divided by 2h: the resolution of a
///           central difference whose two evaluations each carry rounding error;
///   floor = 1e-4 * largest |n| in the leaf, so entries that are tiny relative to
///           the rest of the gradient are not judged on pure rounding noise.
inline FdReport check_gradient(const tensor::Expr& root, const std::vector<tensor::Expr>& wrt, LeafValues values,
                               double h = 1e-5) {
    const auto grads = tensor::gradient(root, wrt);
    const auto analytic = tensor::evaluate(grads, bind_all(values));
    const double f0 = eval_scalar(root, values);

    FdReport report;
    for (std::size_t w = 0; w < wrt.size(); ++w) {
        const std::string& name = wrt[w].attrs().name;
        tensor::Array& x = values.at(name);
        std::vector<double> numeric(x.size());
        std::vector<double> forward(x.size());
        std::vector<double> backward(x.size());
        std::vector<bool> kink(x.size(), false);
        std::vector<double> noise(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double orig = x[i];
            x[i] = orig + h;
            const double fp = eval_scalar(root, values);
            x[i] = orig - h;
            const double fm = eval_scalar(root, values);
            x[i] = orig;
            noise[i] = 16.0 * std::numeric_limits<double>::epsilon() * std::max({std::abs(f0), std::abs(fp), std::abs(fm)}) /
                       (2.0 * h);
            numeric[i] = (fp - fm) / (2.0 * h);
            const double fwd = (fp - f0) / h;
            const double bwd = (f0 - fm) / h;
            forward[i] = fwd;
            backward[i] = bwd;
            const double scale = std::max({std::abs(fwd), std::abs(bwd), 1e-3});
            kink[i] = std::abs(fwd - bwd) > 1e-2 * scale;
        }
        double largest = 0.0;
        for (double n : numeric) largest = std::max(largest, std::abs(n));
        const double floor = std::max(1e-4 * largest, 1e-10);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double a = analytic[w][i];
            const double n = numeric[i];
            ++report.checked;
            if (kink[i]) {
                // One-sided slopes have twice the rounding noise of the central one.
                const double one_sided =
                    std::max(0.0, std::min(std::abs(a - forward[i]), std::abs(a - backward[i])) - 2.0 * noise[i]);
                ++report.kinks;
                report.max_rel_kink =
                    std::max(report.max_rel_kink, one_sided / std::max({std::abs(a), std::abs(n), floor}));
            } else {
                const double rel = std::max(0.0, std::abs(a - n) - noise[i]) / std::max({std::abs(a), std::abs(n), floor});
                report.max_rel_smooth = std::max(report.max_rel_smooth, rel);
            }
        }
    }
    return report;
}

}  // namespace genboot::testing
