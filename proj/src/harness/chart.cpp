#include "genboot/harness/chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace genboot::harness {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 440;
constexpr double kLeft = 70;
constexpr double kRight = 170;  // legend column
constexpr double kTop = 40;
constexpr double kBottom = 55;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v, double step) {
    const int digits = step >= 1.0 ? 0 : std::min(6, static_cast<int>(std::ceil(-std::log10(step) - 1e-9)));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, std::abs(v) < step * 1e-9 ? 0.0 : v);
    return buf;
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// "--" may not appear inside an XML comment.
std::string comment_safe(std::string_view s) {
    std::string out(s);
    for (std::size_t i = out.find("--"); i != std::string::npos; i = out.find("--", i)) out.replace(i, 2, "- -");
    return out;
}

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

double nice_step(double span) {
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    return (f < 1.5 ? 1.0 : f < 3.0 ? 2.0 : f < 7.0 ? 5.0 : 10.0) * mag;
}

// Pads by 5% on each side (never below zero for data that starts at zero)
// and expands to tick multiples; a degenerate range is widened around its value.
Range nice_range(double lo, double hi) {
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        const double pad = std::max(0.5, std::abs(lo) * 0.1);
        lo -= pad;
        hi += pad;
    }
    const double pad = 0.05 * (hi - lo);
    lo = lo == 0.0 ? 0.0 : lo - pad;
    hi = hi == 0.0 ? 0.0 : hi + pad;
    const double step = nice_step(hi - lo);
    return {std::floor(lo / step) * step, std::ceil(hi / step) * step};
}

class Frame {
public:
    Frame(Range x, Range y) : x_(x), y_(y) {}
    double px(double v) const { return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
    double py(double v) const { return kHeight - kBottom - (v - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }
    const Range& x() const { return x_; }
    const Range& y() const { return y_; }

private:
    Range x_;
    Range y_;
};

std::string polyline(const Frame& f, const std::vector<double>& x, const std::vector<double>& y) {
    std::string pts;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i > 0) pts += ' ';
        pts += num(f.px(x[i])) + "," + num(f.py(y[i]));
    }
    return pts;
}

}  // namespace

void validate_chart(const Chart& chart) {
    if (chart.series.empty()) throw std::invalid_argument("chart '" + chart.title + "': no series");
    for (const auto& s : chart.series) {
        const std::string name = "chart '" + chart.title + "', series '" + s.label + "'";
        if (s.x.empty()) throw std::invalid_argument(name + ": empty series");
        if (s.y.size() != s.x.size()) throw std::invalid_argument(name + ": x and y lengths differ");
        const bool band = !s.lower.empty() || !s.upper.empty();
        if (band && (s.lower.size() != s.x.size() || s.upper.size() != s.x.size())) {
            throw std::invalid_argument(name + ": band length differs from the series");
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) throw std::invalid_argument(name + ": non-finite value");
            if (!band) continue;
            if (!std::isfinite(s.lower[i]) || !std::isfinite(s.upper[i])) {
                throw std::invalid_argument(name + ": non-finite band");
            }
            if (s.lower[i] > s.upper[i]) {
                throw std::invalid_argument(name + ": band lower bound exceeds upper bound at point " + std::to_string(i));
            }
        }
    }
}

std::string render_svg(const Chart& chart, std::string_view comment) {
    validate_chart(chart);

    double x_lo = chart.series[0].x[0], x_hi = x_lo, y_lo = chart.series[0].y[0], y_hi = y_lo;
    bool bars = false;
    for (const auto& s : chart.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x_lo = std::min(x_lo, s.x[i]);
            x_hi = std::max(x_hi, s.x[i]);
            y_lo = std::min(y_lo, s.y[i]);
            y_hi = std::max(y_hi, s.y[i]);
            if (!s.lower.empty()) {
                y_lo = std::min(y_lo, s.lower[i]);
                y_hi = std::max(y_hi, s.upper[i]);
            }
        }
        if (s.style == SeriesStyle::Bars) bars = true;
    }
    if (bars) y_lo = std::min(y_lo, 0.0);
    const Range xr = nice_range(x_lo, x_hi);
    const Range yr = nice_range(y_lo, y_hi);
    const Frame f(xr, yr);

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    if (!comment.empty()) o << "<!--\n" << comment_safe(comment) << "\n-->\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(chart.title)
      << "</text>\n";

    // Axes and ticks.
    const double x0 = f.px(xr.lo), x1 = f.px(xr.hi), y0 = f.py(yr.lo), y1 = f.py(yr.hi);
    o << "<g stroke=\"#999\" stroke-width=\"0.5\">\n";
    const double ys = nice_step(yr.hi - yr.lo);
    for (double v = yr.lo; v <= yr.hi + ys * 1e-6; v += ys) {
        o << "<line x1=\"" << num(x0) << "\" y1=\"" << num(f.py(v)) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(f.py(v))
          << "\"/>\n";
    }
    o << "</g>\n";
    o << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0) << "\" height=\"" << num(y0 - y1)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<g text-anchor=\"end\">\n";
    for (double v = yr.lo; v <= yr.hi + ys * 1e-6; v += ys) {
        o << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(f.py(v) + 4) << "\">" << tick_label(v, ys) << "</text>\n";
    }
    o << "</g>\n<g text-anchor=\"middle\">\n";
    const double xs = nice_step(xr.hi - xr.lo);
    for (double v = xr.lo; v <= xr.hi + xs * 1e-6; v += xs) {
        o << "<text x=\"" << num(f.px(v)) << "\" y=\"" << num(y0 + 18) << "\">" << tick_label(v, xs) << "</text>\n";
    }
    o << "</g>\n";
    o << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\">"
      << escape(chart.x_label) << "</text>\n";
    o << "<text transform=\"translate(18," << num((y0 + y1) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(chart.y_label) << "</text>\n";

    // Bands first so lines stay on top.
    for (std::size_t k = 0; k < chart.series.size(); ++k) {
        const auto& s = chart.series[k];
        if (s.lower.empty()) continue;
        std::vector<double> bx(s.x), by(s.upper);
        bx.insert(bx.end(), s.x.rbegin(), s.x.rend());
        by.insert(by.end(), s.lower.rbegin(), s.lower.rend());
        o << "<polygon points=\"" << polyline(f, bx, by) << "\" fill=\"" << kPalette[k % 8]
          << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    }
    for (std::size_t k = 0; k < chart.series.size(); ++k) {
        const auto& s = chart.series[k];
        const char* colour = kPalette[k % 8];
        switch (s.style) {
            case SeriesStyle::Solid:
            case SeriesStyle::Dashed:
                o << "<polyline points=\"" << polyline(f, s.x, s.y) << "\" fill=\"none\" stroke=\"" << colour
                  << "\" stroke-width=\"1.8\"" << (s.style == SeriesStyle::Dashed ? " stroke-dasharray=\"6,4\"" : "")
                  << "/>\n";
                break;
            case SeriesStyle::Points:
                for (std::size_t i = 0; i < s.x.size(); ++i) {
                    o << "<circle cx=\"" << num(f.px(s.x[i])) << "\" cy=\"" << num(f.py(s.y[i])) << "\" r=\"3.5\" fill=\""
                      << colour << "\"/>\n";
                }
                break;
            case SeriesStyle::Bars: {
                // Bar width from the smallest x spacing of the series.
                double gap = xr.hi - xr.lo;
                for (std::size_t i = 1; i < s.x.size(); ++i) gap = std::min(gap, std::abs(s.x[i] - s.x[i - 1]));
                const double w = std::max(1.0, 0.9 * (f.px(xr.lo + gap) - f.px(xr.lo)));
                for (std::size_t i = 0; i < s.x.size(); ++i) {
                    const double top = f.py(std::max(s.y[i], 0.0));
                    const double bottom = f.py(std::min(s.y[i], 0.0));
                    o << "<rect x=\"" << num(f.px(s.x[i]) - w / 2) << "\" y=\"" << num(top) << "\" width=\"" << num(w)
                      << "\" height=\"" << num(bottom - top) << "\" fill=\"" << colour << "\" fill-opacity=\"0.7\"/>\n";
                }
                break;
            }
        }
    }

    // Legend.
    const double lx = kWidth - kRight + 15;
    for (std::size_t k = 0; k < chart.series.size(); ++k) {
        const double ly = kTop + 10 + 20.0 * static_cast<double>(k);
        const auto& s = chart.series[k];
        const char* colour = kPalette[k % 8];
        if (s.style == SeriesStyle::Points) {
            o << "<circle cx=\"" << num(lx + 10) << "\" cy=\"" << num(ly) << "\" r=\"3.5\" fill=\"" << colour << "\"/>\n";
        } else if (s.style == SeriesStyle::Bars) {
            o << "<rect x=\"" << num(lx + 4) << "\" y=\"" << num(ly - 5) << "\" width=\"12\" height=\"10\" fill=\"" << colour
              << "\" fill-opacity=\"0.7\"/>\n";
        } else {
            o << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 20) << "\" y2=\"" << num(ly)
              << "\" stroke=\"" << colour << "\" stroke-width=\"1.8\""
              << (s.style == SeriesStyle::Dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
        }
        o << "<text x=\"" << num(lx + 26) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void emit_chart(const Chart& chart, const std::filesystem::path& path, std::string_view comment) {
    const std::string svg = render_svg(chart, comment);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write chart '" + path.string() + "'");
    out << svg;
    if (!out) throw std::runtime_error("failed writing chart '" + path.string() + "'");
}

}  // namespace genboot::harness
