#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "diflow/error.hpp"
#include "diflow/pipeline.hpp"

namespace {

struct CommonOptions {
    std::string config;
    std::string out_dir = ".";
    std::int64_t seed = -1;
    int k = 0;
    std::string transform;
    bool clamp_negative = false;
    int threads = -1;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool needs_config = true) {
    auto* config = cmd->add_option("-c,--config", opts.config, "run config (JSON)");
    if (needs_config) config->required();
    cmd->add_option("-o,--out-dir", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "jitter seed override");
    cmd->add_option("--k", opts.k, "number of nearest neighbors");
    cmd->add_option("--transform", opts.transform, "increment|return|none");
    cmd->add_flag("--clamp-negative", opts.clamp_negative, "clamp negative edges to zero");
    cmd->add_option("--threads", opts.threads, "worker threads (0 = hardware)");
}

diflow::RunConfig make_config(const CommonOptions& opts) {
    diflow::RunConfig cfg = diflow::load_run_config(opts.config);
    cfg.out_dir = opts.out_dir;
    if (opts.seed >= 0) cfg.estimator.jitter_seed = static_cast<std::uint64_t>(opts.seed);
    if (opts.k > 0) cfg.estimator.k = opts.k;
    if (!opts.transform.empty()) cfg.estimator.transform = diflow::parse_transform(opts.transform);
    if (opts.clamp_negative) cfg.estimator.clamp_negative = true;
    if (opts.threads >= 0) cfg.estimator.threads = opts.threads;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pairwise directed-information ranking of time series"};
    app.require_subcommand(1);

    CommonOptions rank_opts;
    auto* rank = app.add_subcommand("rank", "full graph, net-flow and pagerank rankings");
    add_common(rank, rank_opts);

    CommonOptions heatmap_opts;
    auto* heatmap = app.add_subcommand("heatmap", "weight matrix only");
    add_common(heatmap, heatmap_opts);

    CommonOptions regions_opts;
    auto* regions = app.add_subcommand("regions", "region super-node graph");
    add_common(regions, regions_opts);

    CommonOptions window_opts;
    std::string window_src, window_dst;
    int window_length = 0, window_step = 0;
    auto* window = app.add_subcommand("window", "sliding-window estimates for one pair");
    add_common(window, window_opts);
    window->add_option("--src", window_src, "source index id")->required();
    window->add_option("--dst", window_dst, "destination index id")->required();
    window->add_option("--length", window_length, "window length (samples)");
    window->add_option("--step", window_step, "window step (samples)");

    CommonOptions blocks_opts;
    auto* blocks = app.add_subcommand("blocks", "calendar-month net-flow blocks");
    add_common(blocks, blocks_opts);

    CommonOptions orders_opts;
    auto* orders = app.add_subcommand("orders", "per-pair Markov order diagnostics");
    add_common(orders, orders_opts);

    diflow::SynthSpec synth_spec;
    std::string synth_network = "paper_test";
    std::string synth_out = ".";
    std::int64_t synth_seed = 0;
    int samples_per_day = 1;
    auto* synth = app.add_subcommand("synth", "generate synthetic benchmark data");
    synth->add_option("--network", synth_network, "paper_test|gaussian_lag|iid_pair");
    synth->add_option("--n", synth_spec.n_samples, "samples per series");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--a", synth_spec.a, "gaussian_lag coupling");
    synth->add_option("--sigma-w", synth_spec.sigma_w, "gaussian_lag noise std");
    synth->add_option("--samples-per-day", samples_per_day, "minute keys per synthetic day");
    synth->add_option("-o,--out-dir", synth_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (rank->parsed()) {
            diflow::cmd_rank(make_config(rank_opts));
        } else if (heatmap->parsed()) {
            diflow::cmd_heatmap(make_config(heatmap_opts));
        } else if (regions->parsed()) {
            diflow::cmd_regions(make_config(regions_opts));
        } else if (window->parsed()) {
            diflow::RunConfig cfg = make_config(window_opts);
            if (window_length > 0) cfg.window_length = window_length;
            if (window_step > 0) cfg.window_step = window_step;
            diflow::cmd_window(cfg, window_src, window_dst);
        } else if (blocks->parsed()) {
            diflow::cmd_blocks(make_config(blocks_opts));
        } else if (orders->parsed()) {
            diflow::cmd_orders(make_config(orders_opts));
        } else if (synth->parsed()) {
            synth_spec.network = diflow::parse_synth_network(synth_network);
            synth_spec.seed = static_cast<std::uint64_t>(synth_seed);
            diflow::cmd_synth(synth_spec, synth_out, samples_per_day);
        }
    } catch (const diflow::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
