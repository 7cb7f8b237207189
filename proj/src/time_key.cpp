#include "diflow/time_key.hpp"

#include <cstdio>

#include "diflow/error.hpp"

namespace diflow {

namespace {

bool all_digits(const std::string& s, std::size_t from, std::size_t count) {
    if (from + count > s.size()) return false;
    for (std::size_t i = from; i < from + count; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
    }
    return true;
}

int to_int(const std::string& s, std::size_t from, std::size_t count) {
    int v = 0;
    for (std::size_t i = from; i < from + count; ++i) v = v * 10 + (s[i] - '0');
    return v;
}

int days_in_month(int year, int month) {
    static const int table[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    if (month == 2 && leap) return 29;
    return table[month - 1];
}

}  // namespace

TimeKey parse_time_key(const std::string& text, TimeFormat format) {
    const std::size_t date_len = 10;
    bool shape_ok = text.size() >= date_len && all_digits(text, 0, 4) && text[4] == '-' &&
                    all_digits(text, 5, 2) && text[7] == '-' && all_digits(text, 8, 2);
    if (!shape_ok) {
        throw Error(ErrorCode::ParseError, "bad time key '" + text + "'");
    }
    TimeKey key;
    key.year = to_int(text, 0, 4);
    key.month = to_int(text, 5, 2);
    key.day = to_int(text, 8, 2);
    if (key.month < 1 || key.month > 12 || key.day < 1 ||
        key.day > days_in_month(key.year, key.month)) {
        throw Error(ErrorCode::ParseError, "bad calendar date '" + text + "'");
    }
    if (format == TimeFormat::Date) {
        if (text.size() != date_len) {
            throw Error(ErrorCode::ParseError, "expected date-only key, got '" + text + "'");
        }
        return key;
    }
    bool time_ok = text.size() == date_len + 6 && (text[10] == 'T' || text[10] == ' ') &&
                   all_digits(text, 11, 2) && text[13] == ':' && all_digits(text, 14, 2);
    if (!time_ok) {
        throw Error(ErrorCode::ParseError, "bad datetime key '" + text + "'");
    }
    int hour = to_int(text, 11, 2);
    int min = to_int(text, 14, 2);
    if (hour > 23 || min > 59) {
        throw Error(ErrorCode::ParseError, "bad time of day in '" + text + "'");
    }
    key.minute = hour * 60 + min;
    return key;
}

std::string to_string(const TimeKey& key) {
    char buf[24];
    if (key.intraday()) {
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d", key.year, key.month, key.day,
                      key.minute / 60, key.minute % 60);
    } else {
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", key.year, key.month, key.day);
    }
    return buf;
}

std::string month_of(const TimeKey& key) {
    char buf[12];
    std::snprintf(buf, sizeof buf, "%04d-%02d", key.year, key.month);
    return buf;
}

}  // namespace diflow
