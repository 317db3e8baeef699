#include "dgmd/io/format.hpp"

#include <charconv>

namespace dgmd {

std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

bool parse_number(std::string_view token, double& out) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    const auto res = std::from_chars(token.data(), token.data() + token.size(), out);
    return res.ec == std::errc{} && res.ptr == token.data() + token.size();
}

bool parse_number(std::string_view token, long& out) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    const auto res = std::from_chars(token.data(), token.data() + token.size(), out);
    return res.ec == std::errc{} && res.ptr == token.data() + token.size();
}

} // namespace dgmd
