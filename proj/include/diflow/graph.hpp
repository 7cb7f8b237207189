#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "diflow/estimator.hpp"
#include "diflow/series.hpp"

namespace diflow {

struct EdgeMeta {
    int markov_order = 0;
    int n_effective = 0;
};

/// Weighted directed graph of pairwise DI-rate estimates. weights[i][j] is
/// the estimated rate i -> j in nats; the diagonal is zero.
struct CausalGraph {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<EdgeMeta>> meta;

    std::size_t size() const { return labels.size(); }

    static CausalGraph zero(std::vector<std::string> labels);
};

struct RankingResult {
    std::vector<double> scores;       // aligned with graph labels
    std::vector<std::string> order;   // labels by descending score
};

/// Full pairwise sweep: per ordered pair, intersect calendars, transform,
/// standardize, offset by region order, estimate. Pairs run in parallel;
/// the result is deterministic for a fixed config.
CausalGraph build_graph(const std::vector<RawSeries>& series, const EstimatorConfig& cfg);

/// scores[i] = sum_j w[i][j] - sum_j w[j][i]; order by descending score,
/// ties by label order.
RankingResult net_flow(const CausalGraph& graph);

/// Super-node graph over regions: edge (R1 -> R2) sums all node weights
/// i in R1, j in R2; intra-region pairs are excluded.
CausalGraph aggregate_regions(const CausalGraph& graph,
                              const std::map<std::string, Region>& region_of);

/// Stationary scores of the damped column-stochastic walk on the edge
/// weights (negative entries clamped to zero for this operation only).
/// Dangling nodes teleport uniformly; iterates to 1e-10 L1 convergence.
RankingResult pagerank_rank(const CausalGraph& graph, double damping = 0.85);

// Serialization. JSON and the CSV matrix round-trip weights losslessly
// (17 significant digits).
std::string graph_to_json(const CausalGraph& graph);
CausalGraph graph_from_json(const std::string& text);
void write_csv_matrix(const CausalGraph& graph, std::ostream& out);
CausalGraph read_csv_matrix(std::istream& in);

}  // namespace diflow
