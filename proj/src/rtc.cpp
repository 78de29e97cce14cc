#include "attnet/rtc.hpp"

#include "attnet/error.hpp"

#include <array>
#include <charconv>

namespace attnet::rtc {

namespace {

constexpr std::uint8_t kMode12hBit = 0x40;
constexpr std::uint8_t kPmBit = 0x20;
constexpr std::int64_t kSecondsPerDay = 86400;

void require(bool ok, const char* what) {
    if (!ok) {
        throw RangeError(what);
    }
}

// Advances a valid date by a non-negative number of days, one month at a time.
void add_days(Datetime& dt, std::int64_t days) {
    while (days > 0) {
        const int remaining = days_in_month(dt.year, dt.month) - dt.day;
        if (days <= remaining) {
            dt.day += static_cast<int>(days);
            return;
        }
        days -= remaining + 1;
        dt.day = 1;
        if (++dt.month > 12) {
            dt.month = 1;
            ++dt.year;
            require(dt.year <= kMaxYear, "rtc: calendar overflow past 2099");
        }
    }
}

// Parses 1-2 digit (or exactly 4 digit for years) unpadded decimal fields.
bool parse_field(std::string_view text, int max_digits, int& out) {
    if (text.empty() || text.size() > static_cast<std::size_t>(max_digits)) {
        return false;
    }
    if (text.size() > 1 && text.front() == '0') {
        return false;
    }
    for (char c : text) {
        if (c < '0' || c > '9') {
            return false;
        }
    }
    std::from_chars(text.data(), text.data() + text.size(), out);
    return true;
}

} // namespace

std::uint8_t bcd_encode(int n) {
    if (n < 0 || n > 99) {
        throw RangeError("bcd_encode: " + std::to_string(n) + " outside 0-99");
    }
    return static_cast<std::uint8_t>(((n / 10) << 4) | (n % 10));
}

int bcd_decode(std::uint8_t b) {
    const int hi = b >> 4;
    const int lo = b & 0x0F;
    if (hi > 9 || lo > 9) {
        throw InvalidBcd("bcd_decode: illegal nibble in 0x" +
                         std::string{"0123456789ABCDEF"[hi]} + "0123456789ABCDEF"[lo]);
    }
    return 10 * hi + lo;
}

std::uint8_t encode_hours(int hour24, bool mode_12h) {
    require(hour24 >= 0 && hour24 <= 23, "rtc: hour outside 0-23");
    if (!mode_12h) {
        return bcd_encode(hour24);
    }
    const bool pm = hour24 >= 12;
    int h12 = hour24 % 12;
    if (h12 == 0) {
        h12 = 12;
    }
    return static_cast<std::uint8_t>(kMode12hBit | (pm ? kPmBit : 0) | bcd_encode(h12));
}

int decode_hours(std::uint8_t reg) {
    if ((reg & kMode12hBit) == 0) {
        const int h = bcd_decode(reg & 0x3F);
        require(h <= 23, "rtc: 24 h register outside 0-23");
        return h;
    }
    const bool pm = (reg & kPmBit) != 0;
    const int h12 = bcd_decode(reg & 0x1F);
    require(h12 >= 1 && h12 <= 12, "rtc: 12 h register outside 1-12");
    return (h12 % 12) + (pm ? 12 : 0);
}

bool is_leap_year(int year) {
    // Exact for 2000-2099, the only span the device covers.
    return year % 4 == 0;
}

int days_in_month(int year, int month) {
    static constexpr std::array<int, 12> kDays{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    require(month >= 1 && month <= 12, "rtc: month outside 1-12");
    return month == 2 && is_leap_year(year) ? 29 : kDays[month - 1];
}

int weekday_of(const Datetime& dt) {
    // 2000-01-01 was a Saturday.
    const std::int64_t days = seconds_since_epoch(dt) / kSecondsPerDay;
    return static_cast<int>((6 + days) % 7) + 1;
}

void validate(const Datetime& dt) {
    require(dt.year >= kMinYear && dt.year <= kMaxYear, "rtc: year outside 2000-2099");
    require(dt.month >= 1 && dt.month <= 12, "rtc: month outside 1-12");
    require(dt.day >= 1 && dt.day <= days_in_month(dt.year, dt.month), "rtc: day outside month");
    require(dt.hour >= 0 && dt.hour <= 23, "rtc: hour outside 0-23");
    require(dt.minute >= 0 && dt.minute <= 59, "rtc: minute outside 0-59");
    require(dt.second >= 0 && dt.second <= 59, "rtc: second outside 0-59");
}

void validate(const RtcState& state) {
    require(((state.hours_bcd & kMode12hBit) != 0) == state.mode_12h, "rtc: hours mode bit disagrees with mode flag");
    require(state.day_of_week >= 1 && state.day_of_week <= 7, "rtc: day of week outside 1-7");
    (void)to_datetime(state);
}

RtcState make_state(const Datetime& dt, bool mode_12h) {
    validate(dt);
    RtcState s;
    s.seconds_bcd = bcd_encode(dt.second);
    s.minutes_bcd = bcd_encode(dt.minute);
    s.hours_bcd = encode_hours(dt.hour, mode_12h);
    s.day_of_week = static_cast<std::uint8_t>(weekday_of(dt));
    s.date_bcd = bcd_encode(dt.day);
    s.month_bcd = bcd_encode(dt.month);
    s.year_bcd = bcd_encode(dt.year - kMinYear);
    s.mode_12h = mode_12h;
    return s;
}

Datetime to_datetime(const RtcState& state) {
    Datetime dt;
    dt.second = bcd_decode(state.seconds_bcd);
    dt.minute = bcd_decode(state.minutes_bcd);
    dt.hour = decode_hours(state.hours_bcd);
    dt.day = bcd_decode(state.date_bcd);
    dt.month = bcd_decode(state.month_bcd);
    dt.year = kMinYear + bcd_decode(state.year_bcd);
    validate(dt);
    return dt;
}

RtcState tick(const RtcState& state, std::int64_t elapsed_s) {
    require(elapsed_s >= 0, "rtc: negative elapsed time");
    if (state.clock_halt || elapsed_s == 0) {
        return state;
    }
    Datetime dt = to_datetime(state);
    const std::int64_t second_of_day = dt.hour * 3600 + dt.minute * 60 + dt.second + elapsed_s;
    const std::int64_t days = second_of_day / kSecondsPerDay;
    const std::int64_t rest = second_of_day % kSecondsPerDay;
    dt.hour = static_cast<int>(rest / 3600);
    dt.minute = static_cast<int>(rest / 60 % 60);
    dt.second = static_cast<int>(rest % 60);
    add_days(dt, days);

    RtcState next = make_state(dt, state.mode_12h);
    next.day_of_week = static_cast<std::uint8_t>((state.day_of_week - 1 + days % 7) % 7 + 1);
    return next;
}

std::int64_t seconds_since_epoch(const Datetime& dt) {
    validate(dt);
    std::int64_t days = 0;
    for (int y = kMinYear; y < dt.year; ++y) {
        days += is_leap_year(y) ? 366 : 365;
    }
    for (int m = 1; m < dt.month; ++m) {
        days += days_in_month(dt.year, m);
    }
    days += dt.day - 1;
    return days * kSecondsPerDay + dt.hour * 3600 + dt.minute * 60 + dt.second;
}

Datetime from_seconds_since_epoch(std::int64_t s) {
    require(s >= 0, "rtc: time before 2000-01-01");
    Datetime dt;
    dt.hour = static_cast<int>(s % kSecondsPerDay / 3600);
    dt.minute = static_cast<int>(s % 3600 / 60);
    dt.second = static_cast<int>(s % 60);
    add_days(dt, s / kSecondsPerDay);
    return dt;
}

std::string render_timestamp(const Datetime& dt) {
    return render_date(dt) + ' ' + std::to_string(dt.hour) + ':' + std::to_string(dt.minute) + ':' +
           std::to_string(dt.second);
}

std::string render_timestamp(const RtcState& state) { return render_timestamp(to_datetime(state)); }

std::string render_date(const Datetime& dt) {
    return std::to_string(dt.year) + '/' + std::to_string(dt.month) + '/' + std::to_string(dt.day);
}

Datetime parse_timestamp(std::string_view text) {
    const auto fail = [&] { return ParseError("malformed timestamp '" + std::string(text) + "'"); };

    const auto space = text.find(' ');
    if (space == std::string_view::npos) {
        throw fail();
    }
    const std::string_view date = text.substr(0, space);
    const std::string_view time = text.substr(space + 1);

    const auto split3 = [&](std::string_view part, char sep, std::array<std::string_view, 3>& out) {
        const auto a = part.find(sep);
        const auto b = a == std::string_view::npos ? a : part.find(sep, a + 1);
        if (b == std::string_view::npos || part.find(sep, b + 1) != std::string_view::npos) {
            return false;
        }
        out = {part.substr(0, a), part.substr(a + 1, b - a - 1), part.substr(b + 1)};
        return true;
    };

    std::array<std::string_view, 3> d{};
    std::array<std::string_view, 3> t{};
    Datetime dt;
    if (!split3(date, '/', d) || !split3(time, ':', t) || d[0].size() != 4 || !parse_field(d[0], 4, dt.year) ||
        !parse_field(d[1], 2, dt.month) || !parse_field(d[2], 2, dt.day) || !parse_field(t[0], 2, dt.hour) ||
        !parse_field(t[1], 2, dt.minute) || !parse_field(t[2], 2, dt.second)) {
        throw fail();
    }
    try {
        validate(dt);
    } catch (const RangeError&) {
        throw fail();
    }
    return dt;
}

} // namespace attnet::rtc
