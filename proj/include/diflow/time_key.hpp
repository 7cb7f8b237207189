#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace diflow {

enum class TimeFormat { Date, DateTime };

/// Calendar time key: a date for daily data, date plus minute-of-day for
/// intraday data (minute == -1 marks daily keys).
struct TimeKey {
    std::int32_t year = 0;
    std::int32_t month = 0;
    std::int32_t day = 0;
    std::int32_t minute = -1;

    auto operator<=>(const TimeKey&) const = default;

    bool intraday() const { return minute >= 0; }
};

/// Parses "YYYY-MM-DD" (Date) or "YYYY-MM-DD HH:MM" / "YYYY-MM-DDTHH:MM"
/// (DateTime). Throws Error(ParseError) on malformed input.
TimeKey parse_time_key(const std::string& text, TimeFormat format);

std::string to_string(const TimeKey& key);

/// "YYYY-MM", the calendar-month bucket used by block analyses.
std::string month_of(const TimeKey& key);

}  // namespace diflow
