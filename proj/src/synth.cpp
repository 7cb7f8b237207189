#include "diflow/synth.hpp"

#include <algorithm>
#include <cmath>

#include "diflow/error.hpp"
#include "diflow/rng.hpp"

namespace diflow {

SynthNetwork parse_synth_network(const std::string& name) {
    if (name == "paper_test") return SynthNetwork::PaperTest;
    if (name == "gaussian_lag") return SynthNetwork::GaussianLag;
    if (name == "iid_pair") return SynthNetwork::IidPair;
    throw Error(ErrorCode::ConfigError, "unknown synthetic network '" + name + "'");
}

void SynthSpec::validate() const {
    if (n_samples < 100) {
        throw Error(ErrorCode::ConfigError, "n_samples must be >= 100");
    }
    if (sigma_w <= 0.0) {
        throw Error(ErrorCode::DomainError, "sigma_w must be > 0");
    }
}

namespace {
constexpr int kBurnIn = 100;
}

std::array<std::vector<double>, 4> gen_test_network(int n, std::uint64_t seed,
                                                    std::array<double, 4> noise_scale) {
    if (n < 1) {
        throw Error(ErrorCode::ConfigError, "n must be >= 1");
    }
    const int total = n + kBurnIn;
    std::array<std::vector<double>, 4> w;
    for (int l = 0; l < 4; ++l) {
        Rng rng(stream_seed(seed, static_cast<std::uint64_t>(l)));
        w[l].resize(total);
        for (int t = 0; t < total; ++t) w[l][t] = noise_scale[l] * rng.normal();
    }
    std::vector<double> x1(total), x2(total), x3(total), x4(total);
    for (int t = 0; t < total; ++t) {
        double x1l1 = t >= 1 ? x1[t - 1] : 0.0;
        double x1l2 = t >= 2 ? x1[t - 2] : 0.0;
        double x2l1 = t >= 1 ? x2[t - 1] : 0.0;
        x1[t] = w[0][t];
        x2[t] = x1l1 * x1l1 + x1l2 * x1l2 + w[1][t];
        x3[t] = x2l1 + w[2][t];
        x4[t] = x1l2 + w[3][t];
    }
    std::array<std::vector<double>, 4> out;
    for (int l = 0; l < 4; ++l) {
        const std::vector<double>& x = l == 0 ? x1 : l == 1 ? x2 : l == 2 ? x3 : x4;
        out[l].assign(x.begin() + kBurnIn, x.end());
    }
    return out;
}

GaussianLagPair gen_gaussian_lag(int n, std::uint64_t seed, double a, double sigma_w) {
    if (n < 1) {
        throw Error(ErrorCode::ConfigError, "n must be >= 1");
    }
    if (sigma_w <= 0.0) {
        throw Error(ErrorCode::DomainError, "sigma_w must be > 0");
    }
    const int total = n + kBurnIn;
    Rng src_rng(stream_seed(seed, 0));
    Rng w_rng(stream_seed(seed, 1));
    std::vector<double> src(total), dst(total);
    for (int t = 0; t < total; ++t) {
        src[t] = src_rng.normal();
        dst[t] = (t >= 1 ? a * src[t - 1] : 0.0) + sigma_w * w_rng.normal();
    }
    GaussianLagPair out;
    out.src.assign(src.begin() + kBurnIn, src.end());
    out.dst.assign(dst.begin() + kBurnIn, dst.end());
    return out;
}

std::array<std::vector<double>, 2> gen_iid_pair(int n, std::uint64_t seed) {
    if (n < 1) {
        throw Error(ErrorCode::ConfigError, "n must be >= 1");
    }
    std::array<std::vector<double>, 2> out;
    for (int l = 0; l < 2; ++l) {
        Rng rng(stream_seed(seed, static_cast<std::uint64_t>(l)));
        out[l].resize(n);
        for (int t = 0; t < n; ++t) out[l][t] = rng.normal();
    }
    return out;
}

double analytic_gaussian_di(double a, double sigma_w) {
    if (sigma_w <= 0.0) {
        throw Error(ErrorCode::DomainError, "sigma_w must be > 0");
    }
    return 0.5 * std::log(1.0 + (a * a) / (sigma_w * sigma_w));
}

namespace {

TimeKey advance_day(TimeKey key) {
    static const int table[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    bool leap = (key.year % 4 == 0 && key.year % 100 != 0) || key.year % 400 == 0;
    int dim = key.month == 2 && leap ? 29 : table[key.month - 1];
    if (++key.day > dim) {
        key.day = 1;
        if (++key.month > 12) {
            key.month = 1;
            ++key.year;
        }
    }
    return key;
}

}  // namespace

RawSeries to_raw_series(const std::vector<double>& values, const std::string& id,
                        int samples_per_day) {
    if (samples_per_day < 1) {
        throw Error(ErrorCode::ConfigError, "samples_per_day must be >= 1");
    }
    RawSeries series;
    series.id = id;
    series.region = Region::Other;
    double lo = 0.0;
    for (double v : values) lo = std::min(lo, v);
    double shift = 1.0 - lo;

    TimeKey day{2000, 1, 1, -1};
    int within = 0;
    const int open_minute = 9 * 60 + 30;
    series.timestamps.reserve(values.size());
    series.values.reserve(values.size());
    for (double v : values) {
        TimeKey key = day;
        if (samples_per_day > 1) key.minute = open_minute + within;
        series.timestamps.push_back(key);
        series.values.push_back(v + shift);
        if (++within >= samples_per_day) {
            within = 0;
            day = advance_day(day);
        }
    }
    return series;
}

}  // namespace diflow
