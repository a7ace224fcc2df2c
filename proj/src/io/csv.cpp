#include "genboot/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace genboot::io {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_comment(std::ostream& out, std::string_view text) {
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        const auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        out << "# " << line << '\n';
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out << ',';
        out << cells[i];
    }
    out << '\n';
}

}  // namespace genboot::io
