#include "attnet/common.hpp"

#include "attnet/error.hpp"

#include <cmath>
#include <cstdio>

namespace attnet {

VirtualTime from_seconds(double seconds) { return VirtualTime{std::llround(seconds * 1e6)}; }

std::string format_seconds(VirtualTime t) {
    const auto us = t.count();
    const auto mag = us < 0 ? -us : us;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%s%lld.%06lld", us < 0 ? "-" : "", static_cast<long long>(mag / 1000000),
                  static_cast<long long>(mag % 1000000));
    return buf;
}

VirtualTime parse_seconds(std::string_view text) {
    const auto fail = [&] { return ParseError("malformed seconds value '" + std::string(text) + "'"); };
    if (text.empty()) {
        throw fail();
    }
    std::int64_t whole = 0;
    std::int64_t frac = 0;
    int frac_digits = 0;
    bool seen_dot = false;
    bool seen_digit = false;
    for (char c : text) {
        if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else if (c >= '0' && c <= '9') {
            seen_digit = true;
            if (!seen_dot) {
                if (whole > 1'000'000'000'000LL) {
                    throw fail();
                }
                whole = whole * 10 + (c - '0');
            } else if (frac_digits < 6) {
                frac = frac * 10 + (c - '0');
                ++frac_digits;
            } else if (c != '0') {
                throw ParseError("seconds value '" + std::string(text) + "' is finer than 1 us");
            }
        } else {
            throw fail();
        }
    }
    if (!seen_digit) {
        throw fail();
    }
    for (; frac_digits < 6; ++frac_digits) {
        frac *= 10;
    }
    return VirtualTime{whole * 1000000 + frac};
}

} // namespace attnet
