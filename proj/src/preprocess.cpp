#include "diflow/preprocess.hpp"

#include <cmath>

#include "diflow/error.hpp"

namespace diflow {

Transform parse_transform(const std::string& name) {
    if (name == "increment") return Transform::Increment;
    if (name == "return") return Transform::Return;
    if (name == "none") return Transform::None;
    throw Error(ErrorCode::ConfigError, "unknown transform '" + name + "'");
}

const char* transform_name(Transform transform) {
    switch (transform) {
        case Transform::Increment: return "increment";
        case Transform::Return: return "return";
        case Transform::None: return "none";
    }
    return "none";
}

std::vector<double> increments(std::span<const double> x) {
    if (x.size() < 2) {
        throw Error(ErrorCode::TooShort, "increments need at least 2 samples");
    }
    std::vector<double> out(x.size() - 1);
    for (std::size_t n = 0; n + 1 < x.size(); ++n) out[n] = x[n + 1] - x[n];
    return out;
}

std::vector<double> returns(std::span<const double> x) {
    if (x.size() < 2) {
        throw Error(ErrorCode::TooShort, "returns need at least 2 samples");
    }
    std::vector<double> out(x.size() - 1);
    for (std::size_t n = 0; n + 1 < x.size(); ++n) {
        if (x[n] == 0.0) {
            throw Error(ErrorCode::DivisionByZero, "zero value at sample " + std::to_string(n));
        }
        out[n] = (x[n + 1] - x[n]) / x[n];
    }
    return out;
}

Standardized standardize(std::span<const double> x) {
    if (x.size() < 2) {
        throw Error(ErrorCode::TooShort, "standardize needs at least 2 samples");
    }
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size());
    double sd = std::sqrt(var);

    Standardized out;
    out.values.resize(x.size());
    if (sd == 0.0) {
        out.degenerate = true;
        return out;  // zero sequence
    }
    for (std::size_t n = 0; n < x.size(); ++n) out.values[n] = (x[n] - mean) / sd;
    return out;
}

StdSeries make_std_series(std::span<const double> raw, Transform transform,
                          const std::string& source_id) {
    std::vector<double> transformed;
    switch (transform) {
        case Transform::Increment: transformed = increments(raw); break;
        case Transform::Return: transformed = returns(raw); break;
        case Transform::None: transformed.assign(raw.begin(), raw.end()); break;
    }
    Standardized standardized = standardize(transformed);
    StdSeries series;
    series.source_id = source_id;
    series.transform = transform;
    series.values = std::move(standardized.values);
    series.degenerate = standardized.degenerate;
    return series;
}

}  // namespace diflow
