#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace qaemu {

// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double value) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline bool parse_double(const std::string& token, double& out) {
    const char* first = token.data();
    const char* last = first + token.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

inline bool parse_int(const std::string& token, long long& out) {
    const char* first = token.data();
    const char* last = first + token.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

}  // namespace qaemu
