#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dco::csv {

/// Locale-independent rendering with 17 significant digits; round-trips every finite double.
std::string format_real(double value);

/// Quotes a field when it contains a comma, quote or newline.
std::string quote(std::string_view field);

/// Splits one CSV record honoring double-quoted fields.
std::vector<std::string> split(std::string_view line);

double parse_real(std::string_view text);

}  // namespace dco::csv
