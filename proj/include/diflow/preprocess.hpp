#pragma once

#include <span>
#include <string>
#include <vector>

namespace diflow {

/// Stationarizing transform applied to aligned raw prices before
/// standardization. None leaves already-stationary inputs (e.g. simulated
/// processes) untouched.
enum class Transform { Increment, Return, None };

Transform parse_transform(const std::string& name);
const char* transform_name(Transform transform);

/// out[n] = x[n+1] - x[n]; length len(x) - 1.
std::vector<double> increments(std::span<const double> x);

/// out[n] = (x[n+1] - x[n]) / x[n]; length len(x) - 1.
std::vector<double> returns(std::span<const double> x);

struct Standardized {
    std::vector<double> values;
    bool degenerate = false;  // constant input: values are all zero
};

/// Zero mean, unit variance (population std). Constant input yields the zero
/// sequence with the degenerate flag set.
Standardized standardize(std::span<const double> x);

/// A stationarized, standardized sample sequence ready for estimation.
struct StdSeries {
    std::string source_id;
    Transform transform = Transform::None;
    std::vector<double> values;
    bool degenerate = false;

    std::size_t size() const { return values.size(); }
};

/// Transform + standardize in pipeline order.
StdSeries make_std_series(std::span<const double> raw, Transform transform,
                          const std::string& source_id);

}  // namespace diflow
