#pragma once

#include <string>
#include <utility>
#include <vector>

#include "diflow/time_key.hpp"

namespace diflow {

enum class Region { Asia, Europe, NorthAmerica, Other };

Region parse_region(const std::string& name);
const char* region_name(Region region);

/// One raw index series: strictly increasing time keys with positive prices.
struct RawSeries {
    std::string id;
    Region region = Region::Other;
    std::vector<TimeKey> timestamps;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// Column layout of a delimited input file. The value column defaults to the
/// closing price; intraday files use TimeFormat::DateTime keys.
struct CsvFormat {
    char delimiter = ',';
    std::string time_column = "date";
    std::string value_column = "close";
    TimeFormat time_format = TimeFormat::Date;
};

/// Loads one series from a delimited text file with a header row.
/// Rows with unparseable or non-positive values are an error, never dropped.
RawSeries load_series(const std::string& path, const CsvFormat& format, const std::string& id,
                      Region region);

/// Restricts both series to their common time keys (order preserved).
/// Throws Error(EmptyIntersection) when the calendars are disjoint.
std::pair<RawSeries, RawSeries> intersect_dates(const RawSeries& a, const RawSeries& b);

/// One ordered pair after calendar intersection, with the sample offset
/// implied by the regions' trading order.
struct PairAlignment {
    std::vector<TimeKey> common_keys;
    std::vector<double> src_values;
    std::vector<double> dst_values;
    int delta = 0;
};

PairAlignment align_pair(const RawSeries& src, const RawSeries& dst);

/// Sample offset for an ordered pair: 1 when the source region strictly
/// precedes the destination in the trading-day order
/// Asia -> Europe -> NorthAmerica, else 0. Region Other never offsets.
int region_offset(Region src, Region dst);

/// Checks the RawSeries invariants (used by load_series and synth export).
void validate_series(const RawSeries& series);

}  // namespace diflow
