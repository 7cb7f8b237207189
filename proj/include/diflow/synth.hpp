#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "diflow/series.hpp"

namespace diflow {

enum class SynthNetwork { PaperTest, GaussianLag, IidPair };

SynthNetwork parse_synth_network(const std::string& name);

/// Generator request for the CLI surface. n_samples >= 100 is enforced there;
/// the raw generators below accept any positive length for tests.
struct SynthSpec {
    int n_samples = 2000;
    std::uint64_t seed = 0;
    SynthNetwork network = SynthNetwork::PaperTest;
    double a = 1.0;        // gaussian_lag coupling
    double sigma_w = 1.0;  // gaussian_lag noise std

    void validate() const;
};

/// Four-process nonlinear test network:
///   X1[n] = W1[n]
///   X2[n] = X1[n-1]^2 + X1[n-2]^2 + W2[n]
///   X3[n] = X2[n-1] + W3[n]
///   X4[n] = X1[n-2] + W4[n]
/// with independent standard normal noise per process (one RNG stream each,
/// derived from `seed`), missing lags treated as zero, and 100 burn-in
/// samples discarded. noise_scale lets tests silence individual noise terms
/// to check the recurrences exactly.
std::array<std::vector<double>, 4> gen_test_network(int n, std::uint64_t seed,
                                                    std::array<double, 4> noise_scale = {1, 1, 1,
                                                                                         1});

struct GaussianLagPair {
    std::vector<double> src;
    std::vector<double> dst;  // dst[n] = a * src[n-1] + w[n]
};

GaussianLagPair gen_gaussian_lag(int n, std::uint64_t seed, double a, double sigma_w);

std::array<std::vector<double>, 2> gen_iid_pair(int n, std::uint64_t seed);

/// Closed-form DI rate of the lag channel: 0.5 * ln(1 + a^2 / sigma_w^2).
double analytic_gaussian_di(double a, double sigma_w);

/// Wraps a generated sequence as a loadable series: synthetic time keys from
/// 2000-01-01 (daily for samples_per_day == 1, else that many minute keys per
/// day from 09:30), region Other, and a constant shift to satisfy the
/// positive-price invariant. Standardization cancels the shift downstream.
RawSeries to_raw_series(const std::vector<double>& values, const std::string& id,
                        int samples_per_day = 1);

}  // namespace diflow
