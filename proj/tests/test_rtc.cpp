#include "attnet/error.hpp"
#include "attnet/rtc.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace attnet;
using rtc::Datetime;

namespace {

Datetime tick_dt(const Datetime& dt, std::int64_t s) { return rtc::to_datetime(rtc::tick(rtc::make_state(dt), s)); }

Datetime random_datetime(std::mt19937_64& g) {
    Datetime dt;
    dt.year = std::uniform_int_distribution<int>(2000, 2098)(g);
    dt.month = std::uniform_int_distribution<int>(1, 12)(g);
    dt.day = std::uniform_int_distribution<int>(1, rtc::days_in_month(dt.year, dt.month))(g);
    dt.hour = std::uniform_int_distribution<int>(0, 23)(g);
    dt.minute = std::uniform_int_distribution<int>(0, 59)(g);
    dt.second = std::uniform_int_distribution<int>(0, 59)(g);
    return dt;
}

} // namespace

TEST_CASE("bcd encode/decode") {
    CHECK(rtc::bcd_encode(0) == 0x00);
    CHECK(rtc::bcd_encode(59) == 0x59);
    CHECK(rtc::bcd_encode(7) == 0x07);
    CHECK_THROWS_AS(rtc::bcd_encode(100), RangeError);
    CHECK_THROWS_AS(rtc::bcd_encode(-1), RangeError);

    CHECK(rtc::bcd_decode(0x45) == 45);
    CHECK(rtc::bcd_decode(0x00) == 0);
    CHECK_THROWS_AS(rtc::bcd_decode(0x5A), InvalidBcd);
    CHECK_THROWS_AS(rtc::bcd_decode(0xA0), InvalidBcd);

    for (int n = 0; n <= 99; ++n) {
        CHECK(rtc::bcd_decode(rtc::bcd_encode(n)) == n);
    }
}

TEST_CASE("12 hour register mode") {
    CHECK(rtc::encode_hours(0, true) == 0x52);  // 12 AM
    CHECK(rtc::encode_hours(12, true) == 0x72); // 12 PM
    CHECK(rtc::encode_hours(17, true) == 0x65); // 5 PM
    for (int h = 0; h < 24; ++h) {
        CHECK(rtc::decode_hours(rtc::encode_hours(h, true)) == h);
        CHECK(rtc::decode_hours(rtc::encode_hours(h, false)) == h);
    }
    CHECK_THROWS_AS(rtc::decode_hours(0x40), RangeError); // hour 0 in 12 h mode
    CHECK_THROWS_AS(rtc::decode_hours(0x24), RangeError);

    const auto s = rtc::make_state({2015, 7, 3, 23, 59, 59}, true);
    const auto next = rtc::tick(s, 1);
    CHECK(next.mode_12h);
    CHECK(next.hours_bcd == 0x52);
    CHECK(rtc::to_datetime(next) == Datetime{2015, 7, 4, 0, 0, 0});
}

TEST_CASE("tick rolls months and leap days") {
    CHECK(tick_dt({2015, 6, 30, 23, 59, 59}, 1) == Datetime{2015, 7, 1, 0, 0, 0});
    CHECK(tick_dt({2016, 2, 28, 23, 59, 59}, 1) == Datetime{2016, 2, 29, 0, 0, 0});
    CHECK(tick_dt({2015, 2, 28, 23, 59, 59}, 1) == Datetime{2015, 3, 1, 0, 0, 0});
    CHECK(tick_dt({2000, 2, 28, 23, 59, 59}, 1) == Datetime{2000, 2, 29, 0, 0, 0});
    CHECK(tick_dt({2015, 12, 31, 23, 59, 59}, 1) == Datetime{2016, 1, 1, 0, 0, 0});

    // the same examples via the independent day count
    CHECK(oracle::add_seconds({2015, 6, 30, 23, 59, 59}, 1) == Datetime{2015, 7, 1, 0, 0, 0});
    CHECK(oracle::add_seconds({2015, 2, 28, 23, 59, 59}, 1) == Datetime{2015, 3, 1, 0, 0, 0});

    CHECK_THROWS_AS(tick_dt({2099, 12, 31, 23, 59, 59}, 1), RangeError);
    CHECK_THROWS_AS(rtc::tick(rtc::make_state({}), -1), RangeError);
}

TEST_CASE("halted clock does not advance") {
    auto s = rtc::make_state({2015, 7, 3, 17, 44, 6});
    s.clock_halt = true;
    CHECK(rtc::tick(s, 1000) == s);
}

TEST_CASE("day of week advances mod 7") {
    const auto s = rtc::make_state({2015, 7, 3, 12, 0, 0});
    CHECK(s.day_of_week == 6); // Friday, with 1 = Sunday
    CHECK(rtc::tick(s, 86400).day_of_week == 7);
    CHECK(rtc::tick(s, 2 * 86400).day_of_week == 1);
    CHECK(rtc::tick(s, 7 * 86400).day_of_week == 6);
}

TEST_CASE("tick agrees with the day-count oracle and is additive") {
    std::mt19937_64 g(20150703);
    for (int i = 0; i < 2000; ++i) {
        const Datetime start = random_datetime(g);
        const std::int64_t limit = oracle::seconds_between(start, {2099, 12, 31, 23, 59, 59});
        const std::int64_t a = std::uniform_int_distribution<std::int64_t>(0, limit)(g);
        const std::int64_t b = std::uniform_int_distribution<std::int64_t>(0, limit - a)(g);
        const auto s = rtc::make_state(start);
        REQUIRE(rtc::to_datetime(rtc::tick(s, a)) == oracle::add_seconds(start, a));
        REQUIRE(rtc::tick(rtc::tick(s, a), b) == rtc::tick(s, a + b));
    }
}

TEST_CASE("epoch seconds match the oracle") {
    std::mt19937_64 g(7);
    for (int i = 0; i < 500; ++i) {
        const Datetime dt = random_datetime(g);
        const auto s = rtc::seconds_since_epoch(dt);
        CHECK(s == oracle::seconds_between({2000, 1, 1, 0, 0, 0}, dt));
        CHECK(rtc::from_seconds_since_epoch(s) == dt);
    }
}

TEST_CASE("render timestamps without padding") {
    CHECK(rtc::render_timestamp(Datetime{2015, 7, 3, 17, 44, 6}) == "2015/7/3 17:44:6");
    CHECK(rtc::render_timestamp(Datetime{2015, 7, 5, 19, 41, 51}) == "2015/7/5 19:41:51");
    CHECK(rtc::render_timestamp(Datetime{2000, 1, 1, 0, 0, 0}) == "2000/1/1 0:0:0");
    CHECK(rtc::render_timestamp(rtc::make_state({2015, 7, 3, 17, 44, 6}, true)) == "2015/7/3 17:44:6");
}

TEST_CASE("parse timestamps") {
    CHECK(rtc::parse_timestamp("2015/7/3 17:44:6") == Datetime{2015, 7, 3, 17, 44, 6});
    CHECK_THROWS_AS(rtc::parse_timestamp("2015/13/1 0:0:0"), ParseError);
    CHECK_THROWS_AS(rtc::parse_timestamp("2015/2/29 0:0:0"), ParseError);
    CHECK_THROWS_AS(rtc::parse_timestamp("1999/1/1 0:0:0"), ParseError);
    CHECK_THROWS_AS(rtc::parse_timestamp("2015/07/03 17:44:06"), ParseError);
    CHECK_THROWS_AS(rtc::parse_timestamp("2015/7/5 19:42:3y"), ParseError);
    CHECK_THROWS_AS(rtc::parse_timestamp("2015/7/3  17:44:6"), ParseError);
    CHECK_THROWS_AS(rtc::parse_timestamp("15/7/3 17:44:6"), ParseError);
    CHECK_THROWS_AS(rtc::parse_timestamp(""), ParseError);

    std::mt19937_64 g(99);
    for (int i = 0; i < 1000; ++i) {
        const Datetime dt = random_datetime(g);
        const std::string text = rtc::render_timestamp(dt);
        REQUIRE(rtc::parse_timestamp(text) == dt);
        REQUIRE(rtc::render_timestamp(rtc::parse_timestamp(text)) == text);
    }
}

TEST_CASE("register file validation") {
    auto s = rtc::make_state({2015, 7, 3, 17, 44, 6});
    CHECK_NOTHROW(rtc::validate(s));
    s.date_bcd = 0x32;
    CHECK_THROWS_AS(rtc::validate(s), RangeError);
    s = rtc::make_state({2015, 2, 1, 0, 0, 0});
    s.date_bcd = 0x29; // 2015 is not a leap year
    CHECK_THROWS_AS(rtc::validate(s), RangeError);
    s.date_bcd = 0x1F;
    CHECK_THROWS_AS(rtc::validate(s), InvalidBcd);
    CHECK_THROWS_AS(rtc::make_state({2100, 1, 1, 0, 0, 0}), RangeError);
}
