#pragma once
// Minimal self-contained SVG charts. Output depends only on the input, so
// the same chart always renders to the same bytes.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace genboot::harness {

enum class SeriesStyle { Solid, Dashed, Points, Bars };

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> lower;  // optional band, same length as x
    std::vector<double> upper;
    SeriesStyle style = SeriesStyle::Solid;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

/// Throws std::invalid_argument for an empty chart or series, mismatched
/// lengths, non-finite values, or a band with lower > upper.
void validate_chart(const Chart& chart);

/// `comment` is embedded as an XML comment (for provenance).
std::string render_svg(const Chart& chart, std::string_view comment = {});

void emit_chart(const Chart& chart, const std::filesystem::path& path, std::string_view comment = {});

}  // namespace genboot::harness
