#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "diflow/knn.hpp"
#include "diflow/preprocess.hpp"

namespace diflow {

enum class PredictionMode { JointPast, TargetOnly };

PredictionMode parse_prediction_mode(const std::string& name);

struct EstimatorConfig {
    int k = 4;
    std::vector<int> markov_candidates = {1, 2, 3, 4, 5};
    Transform transform = Transform::Increment;
    std::uint64_t jitter_seed = 0;
    PredictionMode prediction_mode = PredictionMode::JointPast;
    /// Order selection takes the smallest candidate whose prediction loss is
    /// within (1 + order_tolerance) of the minimum; 0 is a plain argmin with
    /// exact ties going to the smallest order.
    double order_tolerance = 0.05;
    bool clamp_negative = false;
    int threads = 0;  // 0: hardware concurrency

    int max_candidate() const;
    void validate() const;
};

/// Sample triples for one ordered pair at Markov order M and offset delta:
/// for target index n, x = src[n-M+delta .. n-1+delta], z = dst[n-M .. n-1],
/// y = dst[n]. With delta = 1 the source window ends at src[n] (the
/// earlier-closing market's same-index sample) and the final target sample is
/// dropped, so n_effective = len - M - delta.
struct EmbeddedPair {
    std::vector<CmiSample> samples;
    int markov_order = 0;
    int delta = 0;
    int n_effective = 0;
};

EmbeddedPair embed_pair(const StdSeries& src, const StdSeries& dst, int markov_order, int delta);

/// Leave-one-out average squared error of k-NN prediction of dst[n] from the
/// past M samples of dst (and of src in JointPast mode). Neighbor ties break
/// by (distance, index).
double knn_predict_loss(const StdSeries& dst, const StdSeries& src, int markov_order, int k,
                        PredictionMode mode);

/// Smallest candidate order whose loss is within the configured tolerance of
/// the best candidate.
int estimate_markov_order(const StdSeries& dst, const StdSeries& src, const EstimatorConfig& cfg);

struct DiEstimate {
    double di = 0.0;  // nats; may be negative (estimator noise)
    int markov_order = 0;
    int n_effective = 0;
};

/// Directed-information rate estimate src -> dst: selects the target's Markov
/// order by joint-past prediction, embeds with the pair offset, and evaluates
/// the conditional mutual information I(src past; dst next | dst past).
DiEstimate estimate_di_rate(const StdSeries& src, const StdSeries& dst, int delta,
                            const EstimatorConfig& cfg);

}  // namespace diflow
