#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

namespace stlam::detail {

// Exactly representable integers print without a decimal point; everything
// else gets round-trip precision.
inline std::string format_number(double v) {
    if (v == std::floor(v) && std::fabs(v) <= 9007199254740992.0) {
        return std::to_string(static_cast<long long>(v));
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline bool parse_int(const std::string& tok, long long& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

inline bool parse_double(const std::string& tok, double& out) {
    if (tok.empty()) return false;
    try {
        size_t pos = 0;
        out = std::stod(tok, &pos);
        return pos == tok.size();
    } catch (...) {
        return false;
    }
}

}  // namespace stlam::detail
