#include "diflow/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "diflow/error.hpp"
#include "diflow/parallel.hpp"

namespace diflow {

namespace fs = std::filesystem;

void RunConfig::validate() const {
    if (manifest.empty()) {
        throw Error(ErrorCode::ConfigError, "manifest must be non-empty");
    }
    std::set<std::string> ids;
    for (const ManifestEntry& entry : manifest) {
        if (!ids.insert(entry.id).second) {
            throw Error(ErrorCode::ConfigError, "duplicate manifest id '" + entry.id + "'");
        }
    }
    estimator.validate();
    if (min_block_samples < 1) {
        throw Error(ErrorCode::ConfigError, "min_block_samples must be >= 1");
    }
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::FileNotFound, path);
    }
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw Error(ErrorCode::ParseError, path + ": bad JSON");
    }
    RunConfig cfg;
    fs::path base = fs::path(path).parent_path();
    if (!j.contains("manifest") || !j["manifest"].is_array()) {
        throw Error(ErrorCode::ConfigError, path + ": missing manifest array");
    }
    for (const auto& entry : j["manifest"]) {
        ManifestEntry m;
        m.id = entry.at("id").get<std::string>();
        m.region = parse_region(entry.value("region", std::string("other")));
        fs::path file = entry.at("file").get<std::string>();
        m.file = (file.is_absolute() ? file : base / file).string();
        cfg.manifest.push_back(std::move(m));
    }
    if (j.contains("csv")) {
        const auto& c = j["csv"];
        std::string delim = c.value("delimiter", std::string(","));
        if (delim.size() != 1) {
            throw Error(ErrorCode::ConfigError, "delimiter must be one character");
        }
        cfg.csv.delimiter = delim[0];
        cfg.csv.time_column = c.value("time_column", cfg.csv.time_column);
        cfg.csv.value_column = c.value("value_column", cfg.csv.value_column);
        std::string tf = c.value("time_format", std::string("date"));
        if (tf == "date") {
            cfg.csv.time_format = TimeFormat::Date;
        } else if (tf == "datetime") {
            cfg.csv.time_format = TimeFormat::DateTime;
        } else {
            throw Error(ErrorCode::ConfigError, "time_format must be date or datetime");
        }
    }
    if (j.contains("estimator")) {
        const auto& e = j["estimator"];
        cfg.estimator.k = e.value("k", cfg.estimator.k);
        if (e.contains("markov_candidates")) {
            cfg.estimator.markov_candidates = e["markov_candidates"].get<std::vector<int>>();
        }
        if (e.contains("transform")) {
            cfg.estimator.transform = parse_transform(e["transform"].get<std::string>());
        }
        cfg.estimator.jitter_seed = e.value("jitter_seed", cfg.estimator.jitter_seed);
        if (e.contains("prediction_mode")) {
            cfg.estimator.prediction_mode =
                parse_prediction_mode(e["prediction_mode"].get<std::string>());
        }
        cfg.estimator.order_tolerance = e.value("order_tolerance", cfg.estimator.order_tolerance);
        cfg.estimator.clamp_negative = e.value("clamp_negative", cfg.estimator.clamp_negative);
        cfg.estimator.threads = e.value("threads", cfg.estimator.threads);
    }
    if (j.contains("window")) {
        cfg.window_length = j["window"].value("length", 0);
        cfg.window_step = j["window"].value("step", 0);
    }
    cfg.min_block_samples = j.value("min_block_samples", cfg.min_block_samples);
    cfg.pagerank_damping = j.value("pagerank_damping", cfg.pagerank_damping);
    cfg.validate();
    return cfg;
}

std::vector<RawSeries> load_manifest_series(const RunConfig& cfg) {
    std::vector<RawSeries> series;
    series.reserve(cfg.manifest.size());
    for (const ManifestEntry& entry : cfg.manifest) {
        series.push_back(load_series(entry.file, cfg.csv, entry.id, entry.region));
    }
    return series;
}

namespace {

std::ofstream open_output(const fs::path& path) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    return out;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_ranking_csv(const fs::path& path, const RankingResult& ranking,
                       const std::vector<std::string>& labels, const char* score_name) {
    std::map<std::string, double> score_of;
    for (std::size_t i = 0; i < labels.size(); ++i) score_of[labels[i]] = ranking.scores[i];
    auto out = open_output(path);
    out << "id," << score_name << ",rank\n";
    for (std::size_t r = 0; r < ranking.order.size(); ++r) {
        out << ranking.order[r] << ',' << fmt17(score_of[ranking.order[r]]) << ',' << r + 1
            << '\n';
    }
}

void write_orders_csv(const fs::path& path, const CausalGraph& graph) {
    auto out = open_output(path);
    out << "source";
    for (const std::string& label : graph.labels) out << ',' << label;
    out << '\n';
    for (std::size_t i = 0; i < graph.size(); ++i) {
        out << graph.labels[i];
        for (std::size_t j = 0; j < graph.size(); ++j) {
            out << ',';
            if (i != j) out << graph.meta[i][j].markov_order;
        }
        out << '\n';
    }
}

struct TransformedPair {
    std::vector<TimeKey> keys;  // keys of the transformed samples
    std::string src_id;
    std::string dst_id;
    std::vector<double> src_transformed;  // transformed, not yet standardized
    std::vector<double> dst_transformed;
    int delta = 0;
};

/// Alignment + transform for one ordered pair. Window and block paths slice
/// the transformed values and standardize per slice, so moments always come
/// from exactly the samples entering an estimate.
TransformedPair transform_pair(const RawSeries& src, const RawSeries& dst, Transform transform) {
    PairAlignment aligned = align_pair(src, dst);
    TransformedPair out;
    out.src_id = src.id;
    out.dst_id = dst.id;
    out.delta = aligned.delta;
    switch (transform) {
        case Transform::Increment:
            out.src_transformed = increments(aligned.src_values);
            out.dst_transformed = increments(aligned.dst_values);
            out.keys.assign(aligned.common_keys.begin() + 1, aligned.common_keys.end());
            break;
        case Transform::Return:
            out.src_transformed = returns(aligned.src_values);
            out.dst_transformed = returns(aligned.dst_values);
            out.keys.assign(aligned.common_keys.begin() + 1, aligned.common_keys.end());
            break;
        case Transform::None:
            out.src_transformed = std::move(aligned.src_values);
            out.dst_transformed = std::move(aligned.dst_values);
            out.keys = std::move(aligned.common_keys);
            break;
    }
    return out;
}

}  // namespace

void cmd_rank(const RunConfig& cfg) {
    cfg.validate();
    std::vector<RawSeries> series = load_manifest_series(cfg);
    CausalGraph graph = build_graph(series, cfg.estimator);

    fs::path out_dir = cfg.out_dir;
    open_output(out_dir / "graph.json") << graph_to_json(graph);
    {
        auto out = open_output(out_dir / "weights.csv");
        write_csv_matrix(graph, out);
    }
    write_ranking_csv(out_dir / "ranking.csv", net_flow(graph), graph.labels, "net_flow");
    write_ranking_csv(out_dir / "pagerank.csv", pagerank_rank(graph, cfg.pagerank_damping),
                      graph.labels, "pagerank");
    write_orders_csv(out_dir / "orders.csv", graph);
}

void cmd_heatmap(const RunConfig& cfg) {
    cfg.validate();
    std::vector<RawSeries> series = load_manifest_series(cfg);
    CausalGraph graph = build_graph(series, cfg.estimator);
    auto out = open_output(fs::path(cfg.out_dir) / "weights.csv");
    write_csv_matrix(graph, out);
}

void cmd_regions(const RunConfig& cfg) {
    cfg.validate();
    std::vector<RawSeries> series = load_manifest_series(cfg);
    CausalGraph graph = build_graph(series, cfg.estimator);
    std::map<std::string, Region> region_of;
    for (const ManifestEntry& entry : cfg.manifest) region_of[entry.id] = entry.region;
    CausalGraph regions = aggregate_regions(graph, region_of);

    fs::path out_dir = cfg.out_dir;
    open_output(out_dir / "region_graph.json") << graph_to_json(regions);
    {
        auto out = open_output(out_dir / "region_weights.csv");
        write_csv_matrix(regions, out);
    }
    write_ranking_csv(out_dir / "region_ranking.csv", net_flow(regions), regions.labels,
                      "net_flow");
}

std::vector<WindowRow> cmd_window(const RunConfig& cfg, const std::string& src_id,
                                  const std::string& dst_id) {
    cfg.validate();
    if (cfg.window_length <= 10 * cfg.estimator.max_candidate()) {
        throw Error(ErrorCode::ConfigError,
                    "window length must exceed 10x the largest Markov candidate");
    }
    if (cfg.window_step < 1) {
        throw Error(ErrorCode::ConfigError, "window step must be >= 1");
    }
    const RawSeries *src_raw = nullptr, *dst_raw = nullptr;
    std::vector<RawSeries> series = load_manifest_series(cfg);
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].id == src_id) src_raw = &series[i];
        if (series[i].id == dst_id) dst_raw = &series[i];
    }
    if (!src_raw || !dst_raw) {
        throw Error(ErrorCode::ConfigError, "pair not found in manifest: " + src_id + " -> " +
                                                dst_id);
    }
    TransformedPair pair = transform_pair(*src_raw, *dst_raw, cfg.estimator.transform);
    const int len = static_cast<int>(pair.keys.size());
    if (cfg.window_length > len) {
        throw Error(ErrorCode::WindowTooLong,
                    "window " + std::to_string(cfg.window_length) + " exceeds aligned length " +
                        std::to_string(len));
    }
    std::vector<int> starts;
    for (int start = 0; start + cfg.window_length <= len; start += cfg.window_step) {
        starts.push_back(start);
    }
    std::vector<WindowRow> rows(starts.size());
    parallel_for(static_cast<int>(starts.size()), cfg.estimator.threads, [&](int t) {
        int start = starts[t];
        std::span<const double> s(pair.src_transformed.data() + start,
                                  static_cast<std::size_t>(cfg.window_length));
        std::span<const double> d(pair.dst_transformed.data() + start,
                                  static_cast<std::size_t>(cfg.window_length));
        Standardized ss = standardize(s);
        Standardized ds = standardize(d);
        StdSeries src_w{src_id, cfg.estimator.transform, std::move(ss.values), ss.degenerate};
        StdSeries dst_w{dst_id, cfg.estimator.transform, std::move(ds.values), ds.degenerate};
        DiEstimate est = estimate_di_rate(src_w, dst_w, pair.delta, cfg.estimator);
        rows[t] = {to_string(pair.keys[start]),
                   to_string(pair.keys[start + cfg.window_length - 1]), est.di,
                   est.markov_order, est.n_effective};
    });

    auto out = open_output(fs::path(cfg.out_dir) / "window.csv");
    out << "start,end,di,markov_order,n_effective\n";
    for (const WindowRow& row : rows) {
        out << row.start << ',' << row.end << ',' << fmt17(row.di) << ',' << row.markov_order
            << ',' << row.n_effective << '\n';
    }
    return rows;
}

std::vector<BlockRow> cmd_blocks(const RunConfig& cfg) {
    cfg.validate();
    std::vector<RawSeries> series = load_manifest_series(cfg);
    const int l = static_cast<int>(series.size());
    if (l < 2) {
        throw Error(ErrorCode::ConfigError, "blocks need at least 2 series");
    }

    struct PairSlices {
        TransformedPair aligned;
        std::map<std::string, std::pair<int, int>> month_range;  // [begin, end)
    };
    std::vector<std::pair<int, int>> pair_index;
    for (int i = 0; i < l; ++i) {
        for (int j = 0; j < l; ++j) {
            if (i != j) pair_index.emplace_back(i, j);
        }
    }
    std::vector<PairSlices> pairs(pair_index.size());
    std::set<std::string> months;
    for (std::size_t t = 0; t < pair_index.size(); ++t) {
        auto [i, j] = pair_index[t];
        pairs[t].aligned = transform_pair(series[i], series[j], cfg.estimator.transform);
        const auto& keys = pairs[t].aligned.keys;
        int begin = 0;
        for (int n = 0; n <= static_cast<int>(keys.size()); ++n) {
            if (n == static_cast<int>(keys.size()) ||
                (n > begin && month_of(keys[n]) != month_of(keys[begin]))) {
                pairs[t].month_range[month_of(keys[begin])] = {begin, n};
                begin = n;
                if (n == static_cast<int>(keys.size())) break;
            }
        }
        for (const auto& [month, range] : pairs[t].month_range) months.insert(month);
    }

    std::vector<std::string> month_list(months.begin(), months.end());
    std::vector<bool> month_ok(month_list.size(), true);
    for (std::size_t m = 0; m < month_list.size(); ++m) {
        for (const PairSlices& p : pairs) {
            auto it = p.month_range.find(month_list[m]);
            int count = it == p.month_range.end() ? 0 : it->second.second - it->second.first;
            if (count < cfg.min_block_samples) {
                month_ok[m] = false;
                std::fprintf(stderr, "blocks: %s flagged block_too_short (%d < %d samples)\n",
                             month_list[m].c_str(), count, cfg.min_block_samples);
                break;
            }
        }
    }

    // flat (month, pair) estimation grid over the usable months
    std::vector<std::vector<double>> month_weights(
        month_list.size(), std::vector<double>(pair_index.size(), 0.0));
    std::vector<std::pair<int, int>> tasks;
    for (std::size_t m = 0; m < month_list.size(); ++m) {
        if (!month_ok[m]) continue;
        for (std::size_t t = 0; t < pair_index.size(); ++t) {
            tasks.emplace_back(static_cast<int>(m), static_cast<int>(t));
        }
    }
    parallel_for(static_cast<int>(tasks.size()), cfg.estimator.threads, [&](int task) {
        auto [m, t] = tasks[task];
        const PairSlices& p = pairs[t];
        auto [begin, end] = p.month_range.at(month_list[m]);
        std::span<const double> s(p.aligned.src_transformed.data() + begin,
                                  static_cast<std::size_t>(end - begin));
        std::span<const double> d(p.aligned.dst_transformed.data() + begin,
                                  static_cast<std::size_t>(end - begin));
        Standardized ss = standardize(s);
        Standardized ds = standardize(d);
        StdSeries src_b{p.aligned.src_id, cfg.estimator.transform, std::move(ss.values),
                        ss.degenerate};
        StdSeries dst_b{p.aligned.dst_id, cfg.estimator.transform, std::move(ds.values),
                        ds.degenerate};
        DiEstimate est = estimate_di_rate(src_b, dst_b, p.aligned.delta, cfg.estimator);
        month_weights[m][t] = cfg.estimator.clamp_negative ? std::max(est.di, 0.0) : est.di;
    });

    std::vector<std::string> labels;
    for (const RawSeries& s : series) labels.push_back(s.id);
    std::vector<BlockRow> rows;
    for (std::size_t m = 0; m < month_list.size(); ++m) {
        if (!month_ok[m]) {
            for (int i = 0; i < l; ++i) {
                rows.push_back({month_list[m], labels[i], 0.0, false});
            }
            continue;
        }
        CausalGraph graph = CausalGraph::zero(labels);
        for (std::size_t t = 0; t < pair_index.size(); ++t) {
            auto [i, j] = pair_index[t];
            graph.weights[i][j] = month_weights[m][t];
        }
        RankingResult ranking = net_flow(graph);
        for (int i = 0; i < l; ++i) {
            rows.push_back({month_list[m], labels[i], ranking.scores[i], true});
        }
    }

    auto out = open_output(fs::path(cfg.out_dir) / "blocks.csv");
    out << "month,id,net_flow,status\n";
    for (const BlockRow& row : rows) {
        out << row.month << ',' << row.id << ',' << fmt17(row.score) << ','
            << (row.ok ? "ok" : "block_too_short") << '\n';
    }
    return rows;
}

void cmd_synth(const SynthSpec& spec, const std::string& out_dir, int samples_per_day) {
    spec.validate();
    std::vector<RawSeries> series;
    switch (spec.network) {
        case SynthNetwork::PaperTest: {
            auto xs = gen_test_network(spec.n_samples, spec.seed);
            for (int l = 0; l < 4; ++l) {
                series.push_back(
                    to_raw_series(xs[l], "X" + std::to_string(l + 1), samples_per_day));
            }
            break;
        }
        case SynthNetwork::GaussianLag: {
            GaussianLagPair pair = gen_gaussian_lag(spec.n_samples, spec.seed, spec.a,
                                                    spec.sigma_w);
            series.push_back(to_raw_series(pair.src, "SRC", samples_per_day));
            series.push_back(to_raw_series(pair.dst, "DST", samples_per_day));
            break;
        }
        case SynthNetwork::IidPair: {
            auto xs = gen_iid_pair(spec.n_samples, spec.seed);
            series.push_back(to_raw_series(xs[0], "A", samples_per_day));
            series.push_back(to_raw_series(xs[1], "B", samples_per_day));
            break;
        }
    }

    fs::path dir = out_dir;
    nlohmann::json manifest = nlohmann::json::array();
    for (const RawSeries& s : series) {
        std::string file_name = s.id + ".csv";
        auto out = open_output(dir / file_name);
        out << "date,close\n";
        for (std::size_t n = 0; n < s.size(); ++n) {
            out << to_string(s.timestamps[n]) << ',' << fmt17(s.values[n]) << '\n';
        }
        manifest.push_back({{"id", s.id}, {"region", region_name(s.region)}, {"file", file_name}});
    }
    nlohmann::json config;
    config["manifest"] = manifest;
    config["csv"] = {{"delimiter", ","},
                     {"time_column", "date"},
                     {"value_column", "close"},
                     {"time_format", samples_per_day > 1 ? "datetime" : "date"}};
    // generated processes are already stationary
    config["estimator"] = {{"transform", "none"}, {"jitter_seed", spec.seed}};
    open_output(dir / "config.json") << config.dump(2) << '\n';
}

void cmd_orders(const RunConfig& cfg) {
    cfg.validate();
    std::vector<RawSeries> series = load_manifest_series(cfg);
    CausalGraph graph = build_graph(series, cfg.estimator);
    write_orders_csv(fs::path(cfg.out_dir) / "orders.csv", graph);
}

}  // namespace diflow
