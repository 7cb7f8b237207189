#pragma once

#include <string>
#include <vector>

#include "diflow/graph.hpp"
#include "diflow/synth.hpp"

namespace diflow {

struct ManifestEntry {
    std::string id;
    Region region = Region::Other;
    std::string file;
};

struct RunConfig {
    std::vector<ManifestEntry> manifest;
    CsvFormat csv;
    EstimatorConfig estimator;
    int window_length = 0;
    int window_step = 0;
    int min_block_samples = 51;
    double pagerank_damping = 0.85;
    std::string out_dir = ".";

    void validate() const;
};

/// Parses a JSON run config; relative data paths resolve against the config
/// file's directory.
RunConfig load_run_config(const std::string& path);

std::vector<RawSeries> load_manifest_series(const RunConfig& cfg);

/// Full ranking: writes graph.json, weights.csv, ranking.csv, pagerank.csv
/// and orders.csv into cfg.out_dir.
void cmd_rank(const RunConfig& cfg);

/// Weight matrix only (weights.csv).
void cmd_heatmap(const RunConfig& cfg);

/// Region super-node graph: region_graph.json, region_weights.csv,
/// region_ranking.csv.
void cmd_regions(const RunConfig& cfg);

struct WindowRow {
    std::string start;
    std::string end;
    double di = 0.0;
    int markov_order = 0;
    int n_effective = 0;
};

/// Sliding-window estimates for one ordered pair; also written to window.csv.
std::vector<WindowRow> cmd_window(const RunConfig& cfg, const std::string& src_id,
                                  const std::string& dst_id);

struct BlockRow {
    std::string month;
    std::string id;
    double score = 0.0;
    bool ok = true;  // false: month flagged BlockTooShort
};

/// Calendar-month net-flow scores; short months are flagged and skipped while
/// the run continues. Also written to blocks.csv.
std::vector<BlockRow> cmd_blocks(const RunConfig& cfg);

/// Generates a synthetic data set (CSV per series + manifest-style config
/// referencing them) into out_dir.
void cmd_synth(const SynthSpec& spec, const std::string& out_dir, int samples_per_day = 1);

/// Per-pair estimated Markov orders (orders.csv).
void cmd_orders(const RunConfig& cfg);

}  // namespace diflow
