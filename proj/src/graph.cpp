#include "diflow/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "diflow/error.hpp"
#include "diflow/parallel.hpp"

namespace diflow {

CausalGraph CausalGraph::zero(std::vector<std::string> labels) {
    CausalGraph g;
    g.labels = std::move(labels);
    g.weights.assign(g.labels.size(), std::vector<double>(g.labels.size(), 0.0));
    g.meta.assign(g.labels.size(), std::vector<EdgeMeta>(g.labels.size()));
    return g;
}

CausalGraph build_graph(const std::vector<RawSeries>& series, const EstimatorConfig& cfg) {
    cfg.validate();
    if (series.size() < 2) {
        throw Error(ErrorCode::ConfigError, "build_graph needs at least 2 series");
    }
    std::vector<std::string> labels;
    labels.reserve(series.size());
    for (const RawSeries& s : series) labels.push_back(s.id);

    CausalGraph graph = CausalGraph::zero(labels);
    const int l = static_cast<int>(series.size());
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < l; ++i) {
        for (int j = 0; j < l; ++j) {
            if (i != j) pairs.emplace_back(i, j);
        }
    }
    parallel_for(static_cast<int>(pairs.size()), cfg.threads, [&](int t) {
        auto [i, j] = pairs[t];
        try {
            PairAlignment aligned = align_pair(series[i], series[j]);
            StdSeries src = make_std_series(aligned.src_values, cfg.transform, series[i].id);
            StdSeries dst = make_std_series(aligned.dst_values, cfg.transform, series[j].id);
            DiEstimate est = estimate_di_rate(src, dst, aligned.delta, cfg);
            double w = est.di;
            if (cfg.clamp_negative && w < 0.0) w = 0.0;
            graph.weights[i][j] = w;
            graph.meta[i][j] = {est.markov_order, est.n_effective};
        } catch (const Error& e) {
            throw Error(e.code(), "pair " + series[i].id + " -> " + series[j].id + ": " +
                                      e.what());
        }
    });
    return graph;
}

RankingResult net_flow(const CausalGraph& graph) {
    const std::size_t l = graph.size();
    RankingResult result;
    result.scores.assign(l, 0.0);
    for (std::size_t i = 0; i < l; ++i) {
        for (std::size_t j = 0; j < l; ++j) {
            result.scores[i] += graph.weights[i][j] - graph.weights[j][i];
        }
    }
    std::vector<std::size_t> idx(l);
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (result.scores[a] != result.scores[b]) return result.scores[a] > result.scores[b];
        return graph.labels[a] < graph.labels[b];
    });
    for (std::size_t i : idx) result.order.push_back(graph.labels[i]);
    return result;
}

CausalGraph aggregate_regions(const CausalGraph& graph,
                              const std::map<std::string, Region>& region_of) {
    const std::size_t l = graph.size();
    std::vector<Region> node_region(l);
    for (std::size_t i = 0; i < l; ++i) {
        auto it = region_of.find(graph.labels[i]);
        if (it == region_of.end()) {
            throw Error(ErrorCode::UnmappedNode, graph.labels[i]);
        }
        node_region[i] = it->second;
    }
    // region nodes in fixed enum order, restricted to regions present
    std::vector<Region> present;
    for (Region r : {Region::Asia, Region::Europe, Region::NorthAmerica, Region::Other}) {
        for (Region nr : node_region) {
            if (nr == r) {
                present.push_back(r);
                break;
            }
        }
    }
    std::vector<std::string> labels;
    for (Region r : present) labels.emplace_back(region_name(r));
    CausalGraph out = CausalGraph::zero(labels);
    auto region_index = [&](Region r) {
        for (std::size_t i = 0; i < present.size(); ++i) {
            if (present[i] == r) return i;
        }
        return present.size();
    };
    for (std::size_t i = 0; i < l; ++i) {
        for (std::size_t j = 0; j < l; ++j) {
            if (i == j || node_region[i] == node_region[j]) continue;
            out.weights[region_index(node_region[i])][region_index(node_region[j])] +=
                graph.weights[i][j];
        }
    }
    return out;
}

RankingResult pagerank_rank(const CausalGraph& graph, double damping) {
    if (!(damping > 0.0 && damping < 1.0)) {
        throw Error(ErrorCode::ConfigError, "damping must lie in (0,1)");
    }
    const std::size_t l = graph.size();
    std::vector<std::vector<double>> w(l, std::vector<double>(l, 0.0));
    std::vector<double> out_sum(l, 0.0);
    for (std::size_t i = 0; i < l; ++i) {
        for (std::size_t j = 0; j < l; ++j) {
            if (i == j) continue;
            w[i][j] = std::max(graph.weights[i][j], 0.0);
            out_sum[i] += w[i][j];
        }
    }
    std::vector<double> score(l, 1.0 / static_cast<double>(l));
    std::vector<double> next(l, 0.0);
    const double tol = 1e-10;
    const int max_iterations = 100000;
    for (int iter = 0; iter < max_iterations; ++iter) {
        double dangling = 0.0;
        for (std::size_t i = 0; i < l; ++i) {
            if (out_sum[i] == 0.0) dangling += score[i];
        }
        double base = (1.0 - damping + damping * dangling) / static_cast<double>(l);
        for (std::size_t j = 0; j < l; ++j) next[j] = base;
        for (std::size_t i = 0; i < l; ++i) {
            if (out_sum[i] == 0.0) continue;
            double share = damping * score[i] / out_sum[i];
            for (std::size_t j = 0; j < l; ++j) next[j] += share * w[i][j];
        }
        double delta = 0.0;
        for (std::size_t j = 0; j < l; ++j) delta += std::fabs(next[j] - score[j]);
        score.swap(next);
        if (delta < tol) {
            RankingResult result;
            result.scores = score;
            std::vector<std::size_t> idx(l);
            std::iota(idx.begin(), idx.end(), 0u);
            std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
                if (score[a] != score[b]) return score[a] > score[b];
                return graph.labels[a] < graph.labels[b];
            });
            for (std::size_t i : idx) result.order.push_back(graph.labels[i]);
            return result;
        }
    }
    throw Error(ErrorCode::NonConvergence, "pagerank did not converge");
}

// ---------------------------------------------------------------------------
// Serialization

std::string graph_to_json(const CausalGraph& graph) {
    nlohmann::json j;
    j["labels"] = graph.labels;
    j["weights"] = graph.weights;
    nlohmann::json orders = nlohmann::json::array();
    nlohmann::json n_eff = nlohmann::json::array();
    for (std::size_t i = 0; i < graph.size(); ++i) {
        nlohmann::json orow = nlohmann::json::array();
        nlohmann::json nrow = nlohmann::json::array();
        for (std::size_t k = 0; k < graph.size(); ++k) {
            orow.push_back(graph.meta[i][k].markov_order);
            nrow.push_back(graph.meta[i][k].n_effective);
        }
        orders.push_back(orow);
        n_eff.push_back(nrow);
    }
    j["markov_orders"] = orders;
    j["n_effective"] = n_eff;
    return j.dump(2) + "\n";
}

CausalGraph graph_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw Error(ErrorCode::ParseError, "bad graph JSON");
    }
    CausalGraph g = CausalGraph::zero(j.at("labels").get<std::vector<std::string>>());
    auto weights = j.at("weights").get<std::vector<std::vector<double>>>();
    if (weights.size() != g.size()) {
        throw Error(ErrorCode::ParseError, "weight matrix shape mismatch");
    }
    for (const auto& row : weights) {
        if (row.size() != g.size()) {
            throw Error(ErrorCode::ParseError, "weight matrix shape mismatch");
        }
    }
    g.weights = std::move(weights);
    if (j.contains("markov_orders")) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            for (std::size_t k = 0; k < g.size(); ++k) {
                g.meta[i][k].markov_order = j["markov_orders"][i][k].get<int>();
                g.meta[i][k].n_effective = j["n_effective"][i][k].get<int>();
            }
        }
    }
    return g;
}

void write_csv_matrix(const CausalGraph& graph, std::ostream& out) {
    out << "source";
    for (const std::string& label : graph.labels) out << ',' << label;
    out << '\n';
    char buf[40];
    for (std::size_t i = 0; i < graph.size(); ++i) {
        out << graph.labels[i];
        for (std::size_t j = 0; j < graph.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", graph.weights[i][j]);
            out << ',' << buf;
        }
        out << '\n';
    }
}

CausalGraph read_csv_matrix(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::ParseError, "empty csv matrix");
    }
    std::vector<std::string> labels;
    {
        std::istringstream header(line);
        std::string field;
        bool first = true;
        while (std::getline(header, field, ',')) {
            if (!first) labels.push_back(field);
            first = false;
        }
    }
    CausalGraph g = CausalGraph::zero(labels);
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (row >= g.size()) {
            throw Error(ErrorCode::ParseError, "too many csv rows");
        }
        std::istringstream fields(line);
        std::string field;
        std::getline(fields, field, ',');  // row label
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (!std::getline(fields, field, ',')) {
                throw Error(ErrorCode::ParseError, "short csv row");
            }
            g.weights[row][j] = std::strtod(field.c_str(), nullptr);
        }
        ++row;
    }
    if (row != g.size()) {
        throw Error(ErrorCode::ParseError, "csv row count mismatch");
    }
    return g;
}

}  // namespace diflow
