#pragma once

// Software model of a DS1307-style real-time clock. The register file is the
// canonical state; calendar arithmetic decodes to binary, advances, and
// re-encodes.

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace attnet::rtc {

inline constexpr int kMinYear = 2000;
inline constexpr int kMaxYear = 2099;

/// Plain calendar date-time within 2000-2099.
struct Datetime {
    int year = kMinYear;
    int month = 1;
    int day = 1;
    int hour = 0;
    int minute = 0;
    int second = 0;

    auto operator<=>(const Datetime&) const = default;
};

/// DS1307 register file.
struct RtcState {
    std::uint8_t seconds_bcd = 0x00;
    std::uint8_t minutes_bcd = 0x00;
    std::uint8_t hours_bcd = 0x00;   // bit 6 set: 12 h mode, bit 5: PM
    std::uint8_t day_of_week = 1;    // 1-7
    std::uint8_t date_bcd = 0x01;
    std::uint8_t month_bcd = 0x01;
    std::uint8_t year_bcd = 0x00;    // 00-99 means 2000-2099
    bool clock_halt = false;
    bool mode_12h = false;

    bool operator==(const RtcState&) const = default;
};

/// Throws RangeError unless 0 <= n <= 99.
std::uint8_t bcd_encode(int n);

/// Throws InvalidBcd if either nibble exceeds 9.
int bcd_decode(std::uint8_t b);

/// Hours register for a 0-23 hour in the requested mode.
std::uint8_t encode_hours(int hour24, bool mode_12h);

/// Decodes either register mode back to 0-23. Throws InvalidBcd / RangeError.
int decode_hours(std::uint8_t reg);

bool is_leap_year(int year);
int days_in_month(int year, int month);

/// 1 = Sunday ... 7 = Saturday.
int weekday_of(const Datetime& dt);

/// Throws RangeError when any field is outside its calendar range.
void validate(const Datetime& dt);

/// Throws InvalidBcd / RangeError if the register file breaks an invariant.
void validate(const RtcState& state);

RtcState make_state(const Datetime& dt, bool mode_12h = false);
Datetime to_datetime(const RtcState& state);

/// Advances the calendar by elapsed_s seconds. A halted clock is returned
/// unchanged. Throws RangeError for negative elapsed or when the result
/// leaves 2000-2099.
RtcState tick(const RtcState& state, std::int64_t elapsed_s);

/// Seconds since 2000-01-01 00:00:00.
std::int64_t seconds_since_epoch(const Datetime& dt);
Datetime from_seconds_since_epoch(std::int64_t s);

/// "Y/M/D H:M:S" with no zero padding, e.g. "2015/7/3 17:44:6".
std::string render_timestamp(const Datetime& dt);
std::string render_timestamp(const RtcState& state);

/// Inverse of render_timestamp. Rejects zero-padded fields so that
/// render(parse(s)) == s for every accepted s. Throws ParseError.
Datetime parse_timestamp(std::string_view text);

/// "Y/M/D" date part only.
std::string render_date(const Datetime& dt);

} // namespace attnet::rtc
