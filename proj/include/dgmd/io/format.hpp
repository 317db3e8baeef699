#pragma once

#include <string>
#include <string_view>

namespace dgmd {

/// Shortest decimal text that parses back to exactly x.
std::string format_double(double x);

/// Whole-token parse of a double or integer; false on any leftover characters.
bool parse_number(std::string_view token, double& out);
bool parse_number(std::string_view token, long& out);

} // namespace dgmd
