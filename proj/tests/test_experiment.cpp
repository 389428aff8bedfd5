#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qcluster/experiment.hpp"
#include "qcluster/sim.hpp"

using namespace qcluster;
namespace fs = std::filesystem;

namespace {

std::string write_tmp(const std::string& name, const std::string& text) {
    fs::path dir = fs::temp_directory_path() / "qcluster_exp_tests";
    fs::create_directories(dir);
    fs::path p = dir / name;
    std::ofstream out(p);
    out << text;
    return p.string();
}

std::string small_config_json() {
    return R"({
      "name": "smoke",
      "port": {"queues": 8, "line_rate_gbps": 10.0, "buffer_bytes": 33554432, "mtu": 1500},
      "workload": {
        "num_flows": 120,
        "cdf_name": "tiny-tail",
        "cdf_points": [[730, 0.4], [4380, 0.75], [43800, 1.0]]
      },
      "sketch": {"rows": 3, "cols": 512},
      "cluster": {"threshold_rule": "adaptive"},
      "pda": true,
      "schedulers": ["QC-LAS", "FIFO"],
      "loads": [0.6],
      "seeds": [1, 2]
    })";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("an experiment sweep writes cells and a summary") {
    std::string cfg_path = write_tmp("smoke.json", small_config_json());
    ExperimentConfig cfg = load_experiment_config(cfg_path);
    CHECK(cfg.base.cdf_points.size() == 3);

    std::string out = (fs::temp_directory_path() / "qcluster_exp_tests" / "out1").string();
    fs::remove_all(out);
    auto results = run_experiment(cfg, out, "", 2);
    REQUIRE(results.size() == 4);  // 2 schedulers x 1 load x 2 seeds
    for (const auto& r : results) {
        CHECK(r.ok);
        CHECK(fs::exists(out + "/" + r.name + "/metrics.csv"));
        CHECK(fs::exists(out + "/" + r.name + "/packets.csv"));
        CHECK(fs::exists(out + "/" + r.name + "/flows.csv"));
        CHECK(fs::exists(out + "/" + r.name + "/manifest.json"));
        CHECK(fs::exists(out + "/" + r.name + "/schedule.csv"));
    }
    std::string summary = read_file(out + "/summary.csv");
    CHECK(summary.find("QC-LAS,0.6,1,ok") != std::string::npos);
    CHECK(summary.find("FIFO,0.6,2,ok") != std::string::npos);
}

TEST_CASE("rerunning a cell reproduces metrics.csv byte for byte") {
    std::string cfg_path = write_tmp("smoke2.json", small_config_json());
    ExperimentConfig cfg = load_experiment_config(cfg_path);
    CellConfig cell = cfg.base;
    cell.scheduler = "QC-LAS";
    cell.load = 0.6;
    cell.seed = 7;

    std::string out_a = (fs::temp_directory_path() / "qcluster_exp_tests" / "cell_a").string();
    std::string out_b = (fs::temp_directory_path() / "qcluster_exp_tests" / "cell_b").string();
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    REQUIRE(run_cell(cell, out_a).ok);

    // Round-trip through the manifest, as a rerun would.
    CellConfig reparsed = parse_cell_manifest(read_file(out_a + "/manifest.json"));
    REQUIRE(run_cell(reparsed, out_b).ok);
    CHECK(read_file(out_a + "/metrics.csv") == read_file(out_b + "/metrics.csv"));
    CHECK(read_file(out_a + "/packets.csv") == read_file(out_b + "/packets.csv"));
}

TEST_CASE("the manifest reproduces the exact trace") {
    std::string cfg_path = write_tmp("smoke3.json", small_config_json());
    CellConfig cell = load_experiment_config(cfg_path).base;
    cell.scheduler = "QC-FQ";
    cell.load = 0.6;
    cell.seed = 3;
    TraceLog direct = run_cell_trace(cell);
    CellConfig reparsed = parse_cell_manifest(cell_manifest_json(cell));
    TraceLog via_manifest = run_cell_trace(reparsed);
    CHECK(trace_hash(direct) == trace_hash(via_manifest));
}

TEST_CASE("replaying the same schedule under the same scheduler reproduces metrics") {
    std::string cfg_path = write_tmp("smoke4.json", small_config_json());
    CellConfig cell = load_experiment_config(cfg_path).base;
    cell.scheduler = "QC-LAS";
    auto flows = cell_schedule(cell);
    std::string sched_path = write_tmp("sched.csv", "");
    {
        std::ofstream out(sched_path);
        save_schedule(flows, out);
    }
    std::string out1 = (fs::temp_directory_path() / "qcluster_exp_tests" / "replay1").string();
    std::string out2 = (fs::temp_directory_path() / "qcluster_exp_tests" / "replay2").string();
    fs::remove_all(out1);
    fs::remove_all(out2);
    auto r1 = replay_schedule(cell, {"QC-LAS", "FIFO"}, sched_path, out1);
    auto r2 = replay_schedule(cell, {"QC-LAS"}, sched_path, out2);
    REQUIRE(r1.size() == 2);
    REQUIRE(r1[0].ok);
    REQUIRE(r1[1].ok);
    REQUIRE(r2[0].ok);
    CHECK(read_file(out1 + "/metrics_QC-LAS.csv") == read_file(out2 + "/metrics_QC-LAS.csv"));

    std::string cmp = read_file(out1 + "/comparison.csv");
    CHECK(cmp.rfind("flow_id,size,fct_QC-LAS,fct_FIFO,delta_FIFO", 0) == 0);
}

TEST_CASE("invalid configs fail before anything runs") {
    CHECK_THROWS(load_experiment_config("/nonexistent/config.json"));
    std::string bad1 = write_tmp("bad1.json", "{ not json");
    CHECK_THROWS(load_experiment_config(bad1));
    std::string bad2 = write_tmp("bad2.json", R"({"schedulers":["FIFO"],"loads":[1.5],
        "seeds":[1],"workload":{"cdf_points":[[100,1.0]]}})");
    CHECK_THROWS(load_experiment_config(bad2));
    std::string bad3 = write_tmp("bad3.json", R"({"schedulers":["FIFO"],"loads":[0.5],"seeds":[1]})");
    CHECK_THROWS(load_experiment_config(bad3));
}

TEST_CASE("a bad cell fails in isolation") {
    std::string cfg_path = write_tmp("smoke5.json", small_config_json());
    ExperimentConfig cfg = load_experiment_config(cfg_path);
    cfg.schedulers = {"FIFO", "static-LAS:not-sorted"};
    std::string out = (fs::temp_directory_path() / "qcluster_exp_tests" / "out_partial").string();
    fs::remove_all(out);
    cfg.schedulers = {"FIFO", "static-LAS:9000,3000,4000,5000,6000,7000,8000"};
    auto results = run_experiment(cfg, out, "", 1);
    int ok = 0, failed = 0;
    for (const auto& r : results) (r.ok ? ok : failed) += 1;
    CHECK(ok == 2);      // FIFO cells survive
    CHECK(failed == 2);  // unsorted static thresholds fail their cells only
}

TEST_CASE("explicit static-LAS thresholds parse from the scheduler name") {
    std::string cfg_path = write_tmp("smoke6.json", small_config_json());
    CellConfig cell = load_experiment_config(cfg_path).base;
    cell.scheduler = "static-LAS:1500,3000,6000,12000,24000,48000,96000";
    TraceLog log = run_cell_trace(cell);
    CHECK(log.delivered > 0);
}

TEST_CASE("the filter narrows the sweep") {
    std::string cfg_path = write_tmp("smoke7.json", small_config_json());
    ExperimentConfig cfg = load_experiment_config(cfg_path);
    std::string out = (fs::temp_directory_path() / "qcluster_exp_tests" / "out_filter").string();
    fs::remove_all(out);
    auto results = run_experiment(cfg, out, "FIFO", 1);
    CHECK(results.size() == 2);
    CHECK_THROWS(run_experiment(cfg, out, "no-such-cell", 1));
}
