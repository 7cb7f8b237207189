#include "diflow/series.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "diflow/error.hpp"

namespace diflow {

Region parse_region(const std::string& name) {
    if (name == "asia") return Region::Asia;
    if (name == "europe") return Region::Europe;
    if (name == "north_america") return Region::NorthAmerica;
    if (name == "other") return Region::Other;
    throw Error(ErrorCode::ConfigError, "unknown region '" + name + "'");
}

const char* region_name(Region region) {
    switch (region) {
        case Region::Asia: return "asia";
        case Region::Europe: return "europe";
        case Region::NorthAmerica: return "north_america";
        case Region::Other: return "other";
    }
    return "other";
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, delimiter)) {
        // trim surrounding whitespace and stray CR from CRLF files
        std::size_t b = field.find_first_not_of(" \t\r");
        std::size_t e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    return fields;
}

double parse_value(const std::string& text, std::size_t row) {
    const char* begin = text.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw Error(ErrorCode::ParseError,
                    "row " + std::to_string(row) + ": bad value '" + text + "'");
    }
    return v;
}

}  // namespace

void validate_series(const RawSeries& series) {
    if (series.timestamps.size() != series.values.size()) {
        throw Error(ErrorCode::ParseError, series.id + ": timestamp/value length mismatch");
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!std::isfinite(series.values[i]) || series.values[i] <= 0.0) {
            throw Error(ErrorCode::ParseError,
                        series.id + ": non-positive value at sample " + std::to_string(i));
        }
        if (i > 0) {
            if (series.timestamps[i] == series.timestamps[i - 1]) {
                throw Error(ErrorCode::DuplicateTimestamp,
                            series.id + ": duplicate key " + to_string(series.timestamps[i]));
            }
            if (series.timestamps[i] < series.timestamps[i - 1]) {
                throw Error(ErrorCode::NonMonotoneTimestamps,
                            series.id + ": key " + to_string(series.timestamps[i]) +
                                " out of order");
            }
        }
    }
}

RawSeries load_series(const std::string& path, const CsvFormat& format, const std::string& id,
                      Region region) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::FileNotFound, path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::ParseError, path + ": empty file");
    }
    auto header = split_line(line, format.delimiter);
    std::size_t time_col = header.size();
    std::size_t value_col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == format.time_column) time_col = c;
        if (header[c] == format.value_column) value_col = c;
    }
    if (time_col == header.size() || value_col == header.size()) {
        throw Error(ErrorCode::ParseError, path + ": header lacks column '" +
                                               (time_col == header.size() ? format.time_column
                                                                          : format.value_column) +
                                               "'");
    }

    RawSeries series;
    series.id = id;
    series.region = region;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto fields = split_line(line, format.delimiter);
        if (fields.size() <= std::max(time_col, value_col)) {
            throw Error(ErrorCode::ParseError,
                        path + ": row " + std::to_string(row) + ": too few columns");
        }
        TimeKey key;
        try {
            key = parse_time_key(fields[time_col], format.time_format);
        } catch (const Error& e) {
            throw Error(ErrorCode::ParseError,
                        path + ": row " + std::to_string(row) + ": " + e.what());
        }
        double value = parse_value(fields[value_col], row);
        if (!std::isfinite(value) || value <= 0.0) {
            throw Error(ErrorCode::ParseError, path + ": row " + std::to_string(row) +
                                                   ": non-positive value " + fields[value_col]);
        }
        if (!series.timestamps.empty()) {
            if (key == series.timestamps.back()) {
                throw Error(ErrorCode::DuplicateTimestamp,
                            path + ": row " + std::to_string(row) + ": " + to_string(key));
            }
            if (key < series.timestamps.back()) {
                throw Error(ErrorCode::NonMonotoneTimestamps,
                            path + ": row " + std::to_string(row) + ": " + to_string(key));
            }
        }
        series.timestamps.push_back(key);
        series.values.push_back(value);
    }
    if (series.values.empty()) {
        throw Error(ErrorCode::ParseError, path + ": no data rows");
    }
    return series;
}

std::pair<RawSeries, RawSeries> intersect_dates(const RawSeries& a, const RawSeries& b) {
    RawSeries out_a;
    out_a.id = a.id;
    out_a.region = a.region;
    RawSeries out_b;
    out_b.id = b.id;
    out_b.region = b.region;

    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a.timestamps[i] < b.timestamps[j]) {
            ++i;
        } else if (b.timestamps[j] < a.timestamps[i]) {
            ++j;
        } else {
            out_a.timestamps.push_back(a.timestamps[i]);
            out_a.values.push_back(a.values[i]);
            out_b.timestamps.push_back(b.timestamps[j]);
            out_b.values.push_back(b.values[j]);
            ++i;
            ++j;
        }
    }
    if (out_a.values.empty()) {
        throw Error(ErrorCode::EmptyIntersection, a.id + " and " + b.id + " share no time keys");
    }
    return {std::move(out_a), std::move(out_b)};
}

PairAlignment align_pair(const RawSeries& src, const RawSeries& dst) {
    auto [a, b] = intersect_dates(src, dst);
    PairAlignment out;
    out.common_keys = std::move(a.timestamps);
    out.src_values = std::move(a.values);
    out.dst_values = std::move(b.values);
    out.delta = region_offset(src.region, dst.region);
    return out;
}

int region_offset(Region src, Region dst) {
    auto rank = [](Region r) -> int {
        switch (r) {
            case Region::Asia: return 0;
            case Region::Europe: return 1;
            case Region::NorthAmerica: return 2;
            case Region::Other: return -1;
        }
        return -1;
    };
    int rs = rank(src);
    int rd = rank(dst);
    if (rs < 0 || rd < 0) return 0;
    return rs < rd ? 1 : 0;
}

}  // namespace diflow
