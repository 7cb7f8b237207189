#include "diflow/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "diflow/error.hpp"

namespace diflow {

PredictionMode parse_prediction_mode(const std::string& name) {
    if (name == "joint_past") return PredictionMode::JointPast;
    if (name == "target_only") return PredictionMode::TargetOnly;
    throw Error(ErrorCode::ConfigError, "unknown prediction mode '" + name + "'");
}

int EstimatorConfig::max_candidate() const {
    int m = 0;
    for (int c : markov_candidates) m = std::max(m, c);
    return m;
}

void EstimatorConfig::validate() const {
    if (k < 1) {
        throw Error(ErrorCode::ConfigError, "k must be >= 1");
    }
    if (markov_candidates.empty()) {
        throw Error(ErrorCode::ConfigError, "markov_candidates must be non-empty");
    }
    for (int c : markov_candidates) {
        if (c < 1) {
            throw Error(ErrorCode::ConfigError, "markov candidates must be >= 1");
        }
    }
    if (order_tolerance < 0.0) {
        throw Error(ErrorCode::ConfigError, "order_tolerance must be >= 0");
    }
}

EmbeddedPair embed_pair(const StdSeries& src, const StdSeries& dst, int markov_order, int delta) {
    if (src.size() != dst.size()) {
        throw Error(ErrorCode::ConfigError, "embed_pair requires aligned equal-length series");
    }
    if (markov_order < 1 || (delta != 0 && delta != 1)) {
        throw Error(ErrorCode::ConfigError, "markov_order must be >= 1 and delta in {0,1}");
    }
    const int len = static_cast<int>(dst.size());
    const int m = markov_order;
    const int count = len - m - delta;
    if (count < 1) {
        throw Error(ErrorCode::TooShort, "series of length " + std::to_string(len) +
                                             " cannot embed M=" + std::to_string(m) +
                                             " delta=" + std::to_string(delta));
    }
    EmbeddedPair out;
    out.markov_order = m;
    out.delta = delta;
    out.n_effective = count;
    out.samples.resize(count);
    for (int r = 0; r < count; ++r) {
        const int n = m + r;
        CmiSample& s = out.samples[r];
        s.x.resize(m);
        s.z.resize(m);
        for (int c = 0; c < m; ++c) {
            s.x[c] = src.values[n - m + delta + c];
            s.z[c] = dst.values[n - m + c];
        }
        s.y = dst.values[n];
    }
    return out;
}

double knn_predict_loss(const StdSeries& dst, const StdSeries& src, int markov_order, int k,
                        PredictionMode mode) {
    const bool joint = mode == PredictionMode::JointPast;
    if (joint && src.size() != dst.size()) {
        throw Error(ErrorCode::ConfigError, "joint prediction requires aligned series");
    }
    const int len = static_cast<int>(dst.size());
    const int m = markov_order;
    if (len <= m + k + 1) {
        throw Error(ErrorCode::TooShort,
                    "need length > M + k + 1 for prediction loss (len=" + std::to_string(len) +
                        ", M=" + std::to_string(m) + ", k=" + std::to_string(k) + ")");
    }
    const int count = len - m;
    const int dims = joint ? 2 * m : m;
    PointSet features(count, dims);
    for (int r = 0; r < count; ++r) {
        const int n = m + r;
        for (int c = 0; c < m; ++c) {
            features.at(r, c) = dst.values[n - m + c];
            if (joint) features.at(r, m + c) = src.values[n - m + c];
        }
    }
    KdTree tree(features);
    std::vector<std::pair<double, int>> nn;
    double loss = 0.0;
    for (int r = 0; r < count; ++r) {
        tree.nearest(features.row(r), k, r, nn);
        double pred = 0.0;
        for (const auto& [dist, idx] : nn) pred += dst.values[m + idx];
        pred /= static_cast<double>(k);
        double err = dst.values[m + r] - pred;
        loss += err * err;
    }
    return loss / static_cast<double>(count);
}

int estimate_markov_order(const StdSeries& dst, const StdSeries& src,
                          const EstimatorConfig& cfg) {
    cfg.validate();
    std::vector<int> candidates = cfg.markov_candidates;
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    if (candidates.size() == 1) return candidates.front();  // forced order

    std::vector<double> losses(candidates.size());
    double best = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        losses[i] = knn_predict_loss(dst, src, candidates[i], cfg.k, cfg.prediction_mode);
        if (i == 0 || losses[i] < best) best = losses[i];
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (losses[i] <= best * (1.0 + cfg.order_tolerance)) return candidates[i];
    }
    return candidates.front();  // unreachable: the minimizer always qualifies
}

DiEstimate estimate_di_rate(const StdSeries& src, const StdSeries& dst, int delta,
                            const EstimatorConfig& cfg) {
    cfg.validate();
    if (src.size() != dst.size()) {
        throw Error(ErrorCode::ConfigError, "estimate_di_rate requires aligned series");
    }
    DiEstimate out;
    out.markov_order = estimate_markov_order(dst, src, cfg);
    EmbeddedPair embedded = embed_pair(src, dst, out.markov_order, delta);
    out.n_effective = embedded.n_effective;
    out.di = estimate_cmi(embedded.samples, cfg.k, cfg.jitter_seed);
    return out;
}

}  // namespace diflow
