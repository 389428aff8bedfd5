// qcsim: experiment runner for the queue-clustering scheduler library.
//
//   qcsim run --config configs/example.json --out results/
//   qcsim run --manifest results/<cell>/manifest.json --out rerun/
//   qcsim replay --schedule sched.csv --config base.json -s QC-LAS -s FIFO --out cmp/
//   qcsim gen --config base.json --load 0.8 --flows 2000 --seed 1 --out sched.csv

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qcluster/experiment.hpp"

using namespace qcluster;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

int env_int_or(const char* name, int fallback) {
    const char* v = std::getenv(name);
    return v != nullptr && *v != '\0' ? std::atoi(v) : fallback;
}

int cmd_run(const std::string& config_path, const std::string& manifest_path,
            const std::string& out_dir, const std::string& filter, int parallel) {
    if (!manifest_path.empty()) {
        std::ifstream in(manifest_path);
        if (!in) {
            std::cerr << "cannot open manifest: " << manifest_path << "\n";
            return 1;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        CellConfig cell = parse_cell_manifest(buf.str());
        CellResult res = run_cell(cell, out_dir + "/" + cell.cell_name());
        if (!res.ok) {
            std::cerr << res.name << ": " << res.error << "\n";
            return 1;
        }
        std::cout << res.name << ": ok\n";
        return 0;
    }

    ExperimentConfig cfg = load_experiment_config(config_path);
    auto results = run_experiment(cfg, out_dir, filter, parallel);
    int failures = 0;
    for (const auto& r : results) {
        if (r.ok) {
            std::cout << r.name << ": ok\n";
        } else {
            ++failures;
            std::cerr << r.name << ": FAILED: " << r.error << "\n";
        }
    }
    std::cout << results.size() - static_cast<std::size_t>(failures) << "/" << results.size()
              << " cells ok; summary at " << out_dir << "/summary.csv\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"queue-clustering scheduling simulator"};
    app.require_subcommand(1);

    std::string config_path, manifest_path, filter;
    std::string out_dir = env_or("QCSIM_OUT", "results");
    int parallel = env_int_or("QCSIM_PARALLEL", 1);

    auto* run = app.add_subcommand("run", "run an experiment config (or rerun one cell manifest)");
    run->add_option("--config,-c", config_path, "experiment config (JSON)");
    run->add_option("--manifest,-m", manifest_path, "single-cell manifest to rerun");
    run->add_option("--out,-o", out_dir, "output directory");
    run->add_option("--filter,-f", filter, "only run cells whose name contains this");
    run->add_option("--parallel,-j", parallel, "cells to run in parallel");

    std::string schedule_path;
    std::vector<std::string> schedulers;
    auto* replay = app.add_subcommand("replay", "replay an exported flow schedule");
    replay->add_option("--schedule", schedule_path, "schedule CSV from a previous run")->required();
    replay->add_option("--config,-c", config_path, "base config for port/sketch settings");
    replay->add_option("--scheduler,-s", schedulers, "scheduler(s) to replay under")->required();
    replay->add_option("--out,-o", out_dir, "output directory");

    double load = 0.8;
    std::uint64_t seed = 1;
    std::size_t num_flows = 0;
    bool with_deadlines = false;
    std::string sched_out;
    auto* gen = app.add_subcommand("gen", "generate and export a flow schedule");
    gen->add_option("--config,-c", config_path, "base config (workload/port settings)")->required();
    gen->add_option("--load", load, "offered load fraction");
    gen->add_option("--seed", seed, "rng seed");
    gen->add_option("--flows", num_flows, "number of flows (default from config)");
    gen->add_flag("--deadlines", with_deadlines, "assign deadlines to small flows");
    gen->add_option("--out,-o", sched_out, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (config_path.empty() && manifest_path.empty()) {
                std::cerr << "run needs --config or --manifest\n";
                return 1;
            }
            return cmd_run(config_path, manifest_path, out_dir, filter, parallel);
        }
        if (replay->parsed()) {
            CellConfig base;
            if (!config_path.empty()) {
                base = load_experiment_config(config_path).base;
            }
            auto results = replay_schedule(base, schedulers, schedule_path, out_dir);
            int failures = 0;
            for (const auto& r : results) {
                if (r.ok) {
                    std::cout << r.name << ": ok";
                    auto it = r.metrics.find("fct_mean_all");
                    if (it != r.metrics.end()) std::cout << " (mean fct " << it->second << "s)";
                    std::cout << "\n";
                } else {
                    ++failures;
                    std::cerr << r.name << ": FAILED: " << r.error << "\n";
                }
            }
            return failures == 0 ? 0 : 1;
        }
        if (gen->parsed()) {
            ExperimentConfig cfg = load_experiment_config(config_path);
            CellConfig cell = cfg.base;
            cell.load = load;
            cell.seed = seed;
            if (num_flows > 0) cell.num_flows = num_flows;
            cell.deadlines = cell.deadlines || with_deadlines;
            auto flows = cell_schedule(cell);
            std::ofstream out(sched_out);
            if (!out) {
                std::cerr << "cannot write " << sched_out << "\n";
                return 1;
            }
            save_schedule(flows, out);
            std::cout << flows.size() << " flows -> " << sched_out << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
