#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qcluster/metrics.hpp"
#include "qcluster/qcluster_scheduler.hpp"
#include "qcluster/scheduler.hpp"
#include "qcluster/sim.hpp"
#include "qcluster/workload.hpp"

namespace qcluster {

inline constexpr const char* kVersion = "0.1.0";

// Everything one simulation cell needs, fully resolved (the CDF is embedded,
// so a manifest alone reproduces the cell byte for byte).
struct CellConfig {
    std::string experiment;
    std::string scheduler;  // e.g. "QC-LAS", "FIFO", "static-LAS-worst"
    double load = 0.8;
    std::uint64_t seed = 1;

    PortConfig port;
    SourceModel source;
    std::size_t num_flows = 2000;
    std::string cdf_name;
    std::vector<std::pair<std::uint64_t, double>> cdf_points;
    bool log_interpolation = false;
    bool web_search_buckets = false;
    bool deadlines = false;
    std::uint64_t deadline_cutoff = 100'000;
    double deadline_slack_factor = 2.0;

    ScmConfig sketch;
    ClusterConfig cluster;  // num_queues mirrors port.num_queues
    bool pda = true;
    int deadline_queues = 0;
    bool ddl_edf = false;

    std::string cell_name() const;
};

// The experiment file: a cell config template plus the swept axes.
struct ExperimentConfig {
    CellConfig base;
    std::vector<std::string> schedulers;
    std::vector<double> loads;
    std::vector<std::uint64_t> seeds;
};

ExperimentConfig load_experiment_config(const std::string& path);

std::string cell_manifest_json(const CellConfig& cell);
CellConfig parse_cell_manifest(const std::string& json_text);

// The flow schedule a cell runs (sizes, starts, deadlines), before scheduling.
std::vector<FlowSpec> cell_schedule(const CellConfig& cell);

// Scheduler factory. Needs the schedule for data-dependent presets
// (static-LAS-worst quantiles, static-LAS-opt sweep).
std::unique_ptr<Scheduler> make_scheduler(const CellConfig& cell,
                                          const std::vector<FlowSpec>& flows);

// Offline threshold sweep minimizing mean FCT on this schedule.
std::vector<double> opt_static_thresholds(const CellConfig& cell,
                                          const std::vector<FlowSpec>& flows);

struct CellResult {
    std::string name;
    bool ok = false;
    std::string error;
    std::map<std::string, double> metrics;
};

// Runs one cell and writes schedule.csv, packets.csv, flows.csv,
// thresholds.csv (when produced), metrics.csv and manifest.json to `dir`.
CellResult run_cell(const CellConfig& cell, const std::string& dir);

// In-memory variant for tests and paired comparisons.
TraceLog run_cell_trace(const CellConfig& cell);
TraceLog run_trace(const CellConfig& cell, const std::vector<FlowSpec>& flows);

// Expands the sweep, runs cells (cell-parallel), writes per-cell directories
// plus summary.csv under out_dir. `filter` keeps cells whose name contains
// it. Returns the per-cell results in sweep order.
std::vector<CellResult> run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                       const std::string& filter, int parallelism);

// Replays one exported schedule under each named scheduler and writes a
// per-flow FCT comparison (fct_<name> columns, deltas against the first).
std::vector<CellResult> replay_schedule(const CellConfig& base,
                                        const std::vector<std::string>& schedulers,
                                        const std::string& schedule_csv_path,
                                        const std::string& out_dir);

}  // namespace qcluster
