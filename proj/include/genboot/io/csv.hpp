#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace genboot::io {

/// Shortest text that reads back to exactly `value`; "nan", "inf" or "-inf" otherwise.
std::string format_double(double value);

/// Writes every line of `text` prefixed with "# ".
void write_comment(std::ostream& out, std::string_view text);

void write_row(std::ostream& out, const std::vector<std::string>& cells);

}  // namespace genboot::io
