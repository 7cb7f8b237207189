#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "diflow/error.hpp"
#include "diflow/pipeline.hpp"
#include "diflow/rng.hpp"

using namespace diflow;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("synth output loads back through the manifest") {
    fs::path dir = fresh_dir("diflow_pipe_synth");
    SynthSpec spec;
    spec.network = SynthNetwork::PaperTest;
    spec.n_samples = 400;
    spec.seed = 11;
    cmd_synth(spec, dir.string());

    RunConfig cfg = load_run_config((dir / "config.json").string());
    CHECK(cfg.manifest.size() == 4);
    CHECK(cfg.estimator.transform == Transform::None);
    CHECK(cfg.estimator.jitter_seed == 11);
    auto series = load_manifest_series(cfg);
    REQUIRE(series.size() == 4);
    CHECK(series[0].id == "X1");
    CHECK(series[0].size() == 400);
    CHECK(series[0].region == Region::Other);
}

TEST_CASE("cmd_rank writes a consistent output set") {
    fs::path dir = fresh_dir("diflow_pipe_rank");
    SynthSpec spec;
    spec.network = SynthNetwork::GaussianLag;
    spec.n_samples = 900;
    spec.seed = 5;
    cmd_synth(spec, dir.string());

    RunConfig cfg = load_run_config((dir / "config.json").string());
    cfg.out_dir = (dir / "out").string();
    cmd_rank(cfg);

    CausalGraph g = graph_from_json(slurp(dir / "out" / "graph.json"));
    REQUIRE(g.labels == std::vector<std::string>{"SRC", "DST"});
    CHECK(g.weights[0][1] > 0.2);  // driving direction dominates
    CHECK(g.weights[0][1] > g.weights[1][0]);

    std::ifstream weights(dir / "out" / "weights.csv");
    CausalGraph csv_graph = read_csv_matrix(weights);
    CHECK(csv_graph.weights == g.weights);

    std::string ranking = slurp(dir / "out" / "ranking.csv");
    CHECK(ranking.find("id,net_flow,rank") == 0);
    CHECK(ranking.find("SRC") != std::string::npos);
    CHECK(slurp(dir / "out" / "pagerank.csv").find("id,pagerank,rank") == 0);
    CHECK(slurp(dir / "out" / "orders.csv").find("source,SRC,DST") == 0);
}

TEST_CASE("cmd_rank output is deterministic byte for byte") {
    fs::path dir = fresh_dir("diflow_pipe_det");
    SynthSpec spec;
    spec.network = SynthNetwork::PaperTest;
    spec.n_samples = 300;
    spec.seed = 21;
    cmd_synth(spec, dir.string());
    RunConfig cfg = load_run_config((dir / "config.json").string());
    cfg.estimator.threads = 4;

    cfg.out_dir = (dir / "a").string();
    cmd_rank(cfg);
    cfg.out_dir = (dir / "b").string();
    cmd_rank(cfg);
    CHECK(slurp(dir / "a" / "graph.json") == slurp(dir / "b" / "graph.json"));
    CHECK(slurp(dir / "a" / "ranking.csv") == slurp(dir / "b" / "ranking.csv"));
}

TEST_CASE("window over the full length equals the rank edge") {
    fs::path dir = fresh_dir("diflow_pipe_window");
    SynthSpec spec;
    spec.network = SynthNetwork::GaussianLag;
    spec.n_samples = 700;
    spec.seed = 31;
    cmd_synth(spec, dir.string());
    RunConfig cfg = load_run_config((dir / "config.json").string());
    cfg.out_dir = (dir / "out").string();

    cmd_rank(cfg);
    CausalGraph g = graph_from_json(slurp(dir / "out" / "graph.json"));

    cfg.window_length = 700;
    cfg.window_step = 700;
    auto rows = cmd_window(cfg, "SRC", "DST");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].di == g.weights[0][1]);
    CHECK(rows[0].markov_order == g.meta[0][1].markov_order);
    CHECK(rows[0].n_effective == g.meta[0][1].n_effective);
    CHECK(rows[0].start == "2000-01-01");
}

TEST_CASE("window stepping and error paths") {
    fs::path dir = fresh_dir("diflow_pipe_window2");
    SynthSpec spec;
    spec.network = SynthNetwork::GaussianLag;
    spec.n_samples = 800;
    spec.seed = 33;
    cmd_synth(spec, dir.string());
    RunConfig cfg = load_run_config((dir / "config.json").string());
    cfg.out_dir = (dir / "out").string();

    cfg.window_length = 400;
    cfg.window_step = 200;
    auto rows = cmd_window(cfg, "SRC", "DST");
    CHECK(rows.size() == 3);  // starts at 0, 200, 400
    for (const auto& row : rows) CHECK(row.n_effective > 0);

    cfg.window_length = 2000;
    CHECK_THROWS_AS(cmd_window(cfg, "SRC", "DST"), Error);  // WindowTooLong
    cfg.window_length = 30;                                 // <= 10 * max candidate
    CHECK_THROWS_AS(cmd_window(cfg, "SRC", "DST"), Error);
    cfg.window_length = 400;
    CHECK_THROWS_AS(cmd_window(cfg, "SRC", "NOPE"), Error);
}

TEST_CASE("stationary pair: every window tracks the analytic value") {
    fs::path dir = fresh_dir("diflow_pipe_window_oracle");
    SynthSpec spec;
    spec.network = SynthNetwork::GaussianLag;
    spec.n_samples = 10000;
    spec.seed = 61;
    cmd_synth(spec, dir.string());
    RunConfig cfg = load_run_config((dir / "config.json").string());
    cfg.out_dir = (dir / "out").string();
    cfg.window_length = 2500;
    cfg.window_step = 2500;

    const double truth = analytic_gaussian_di(1.0, 1.0);
    auto rows = cmd_window(cfg, "SRC", "DST");
    REQUIRE(rows.size() == 4);
    for (const auto& row : rows) {
        CHECK(std::fabs(row.di - truth) < 0.2 * truth);
    }
}

TEST_CASE("a coupling switched on mid-series raises the later windows") {
    fs::path dir = fresh_dir("diflow_pipe_window_ramp");
    // first half decoupled, second half dst[n] = src[n-1] + noise
    Rng src_rng(stream_seed(71, 0));
    Rng noise(stream_seed(71, 1));
    const int n = 8000;
    std::vector<double> src(n), dst(n);
    for (int t = 0; t < n; ++t) {
        src[t] = src_rng.normal();
        double coupling = t >= n / 2 && t >= 1 ? src[t - 1] : 0.0;
        dst[t] = coupling + noise.normal();
    }
    std::vector<RawSeries> series{to_raw_series(src, "SRC"), to_raw_series(dst, "DST")};
    for (const RawSeries& s : series) {
        std::ofstream out(dir / (s.id + ".csv"));
        out << "date,close\n";
        char buf[40];
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", s.values[i]);
            out << to_string(s.timestamps[i]) << ',' << buf << '\n';
        }
    }
    std::ofstream cfg_out(dir / "config.json");
    cfg_out << R"({"manifest":[{"id":"SRC","region":"other","file":"SRC.csv"},)"
            << R"({"id":"DST","region":"other","file":"DST.csv"}],)"
            << R"("estimator":{"transform":"none","jitter_seed":71}})";
    cfg_out.close();

    RunConfig cfg = load_run_config((dir / "config.json").string());
    cfg.out_dir = (dir / "out").string();
    cfg.window_length = 2000;
    cfg.window_step = 2000;
    auto rows = cmd_window(cfg, "SRC", "DST");
    REQUIRE(rows.size() == 4);
    CHECK(rows.back().di > rows.front().di);
    CHECK(rows[3].di > 0.15);
    CHECK(std::fabs(rows[0].di) < 0.05);
}

TEST_CASE("blocks produce one row per month and index") {
    fs::path dir = fresh_dir("diflow_pipe_blocks");
    SynthSpec spec;
    spec.network = SynthNetwork::GaussianLag;
    spec.n_samples = 12 * 31 * 10;  // 10 samples/day -> every month well covered
    spec.seed = 41;
    cmd_synth(spec, dir.string(), 10);
    RunConfig cfg = load_run_config((dir / "config.json").string());
    cfg.out_dir = (dir / "out").string();
    cfg.min_block_samples = 60;

    auto rows = cmd_blocks(cfg);
    REQUIRE(!rows.empty());
    int ok_months = 0, short_months = 0;
    double src_positive = 0, months = 0;
    for (std::size_t r = 0; r < rows.size(); r += 2) {
        REQUIRE(rows[r].id == "SRC");
        REQUIRE(rows[r + 1].id == "DST");
        if (rows[r].ok) {
            ++ok_months;
            months += 1;
            if (rows[r].score > 0) src_positive += 1;
            CHECK(rows[r].score == doctest::Approx(-rows[r + 1].score).epsilon(1e-12));
        } else {
            ++short_months;
        }
    }
    CHECK(ok_months >= 12);
    // the driving node should be a net source in the vast majority of months
    CHECK(src_positive / months > 0.8);
    CHECK(slurp(dir / "out" / "blocks.csv").find("month,id,net_flow,status") == 0);
}

TEST_CASE("short months are flagged and the run continues") {
    fs::path dir = fresh_dir("diflow_pipe_blocks_short");
    SynthSpec spec;
    spec.network = SynthNetwork::GaussianLag;
    spec.n_samples = 3100;  // daily keys: ~100/month, last month truncated
    spec.seed = 43;
    cmd_synth(spec, dir.string(), 100);
    RunConfig cfg = load_run_config((dir / "config.json").string());
    cfg.out_dir = (dir / "out").string();
    cfg.min_block_samples = 4000;  // force every month short

    auto rows = cmd_blocks(cfg);
    REQUIRE(!rows.empty());
    for (const auto& row : rows) CHECK_FALSE(row.ok);
}

TEST_CASE("same-day influence across regions survives the full price pipeline") {
    fs::path dir = fresh_dir("diflow_pipe_offset");
    // Asian increments drive the same-index US increments; prices are the
    // cumulative sums, so the increment transform recovers the coupling and
    // the region order supplies the one-sample source advance.
    Rng x_rng(stream_seed(81, 0));
    Rng noise(stream_seed(81, 1));
    const int n = 1500;
    std::vector<double> asia_price(n + 1, 1000.0), us_price(n + 1, 1000.0);
    for (int t = 0; t < n; ++t) {
        double x = x_rng.normal();
        asia_price[t + 1] = asia_price[t] + x;
        us_price[t + 1] = us_price[t] + x + noise.normal();
    }
    auto write_csv = [&](const std::string& id, const std::vector<double>& prices) {
        std::ofstream out(dir / (id + ".csv"));
        out << "date,close\n";
        RawSeries shaped = to_raw_series(prices, id);  // synthetic calendar
        char buf[40];
        for (std::size_t i = 0; i < prices.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", prices[i]);
            out << to_string(shaped.timestamps[i]) << ',' << buf << '\n';
        }
    };
    write_csv("NKY", asia_price);
    write_csv("DJI", us_price);
    std::ofstream cfg_out(dir / "config.json");
    cfg_out << R"({"manifest":[{"id":"NKY","region":"asia","file":"NKY.csv"},)"
            << R"({"id":"DJI","region":"north_america","file":"DJI.csv"}],)"
            << R"("estimator":{"transform":"increment","jitter_seed":81}})";
    cfg_out.close();

    RunConfig cfg = load_run_config((dir / "config.json").string());
    cfg.out_dir = (dir / "out").string();
    cmd_rank(cfg);
    CausalGraph g = graph_from_json(slurp(dir / "out" / "graph.json"));
    REQUIRE(g.labels == std::vector<std::string>{"NKY", "DJI"});
    CHECK(g.weights[0][1] > 0.2);   // asia -> us rides the delta=1 advance
    CHECK(g.weights[1][0] < 0.05);  // us -> asia sees nothing
    std::string ranking = slurp(dir / "out" / "ranking.csv");
    CHECK(ranking.find("NKY,") != std::string::npos);
    CHECK(ranking.find("NKY") < ranking.find("DJI"));
}

TEST_CASE("run config validation and overrides") {
    fs::path dir = fresh_dir("diflow_pipe_cfg");
    SynthSpec spec;
    spec.network = SynthNetwork::IidPair;
    spec.n_samples = 150;
    cmd_synth(spec, dir.string());

    // missing manifest file is a config error at load
    std::ofstream bad(dir / "bad.json");
    bad << "{\"manifest\": []}";
    bad.close();
    CHECK_THROWS_AS(load_run_config((dir / "bad.json").string()), Error);
    CHECK_THROWS_AS(load_run_config((dir / "missing.json").string()), Error);

    std::ofstream garbage(dir / "garbage.json");
    garbage << "not json";
    garbage.close();
    CHECK_THROWS_AS(load_run_config((dir / "garbage.json").string()), Error);

    RunConfig cfg = load_run_config((dir / "config.json").string());
    CHECK(cfg.estimator.k == 4);
    CHECK(cfg.estimator.order_tolerance == 0.05);
    CHECK(cfg.pagerank_damping == 0.85);

    RunConfig dup = cfg;
    dup.manifest.push_back(dup.manifest.front());
    CHECK_THROWS_AS(dup.validate(), Error);  // duplicate manifest id
}
