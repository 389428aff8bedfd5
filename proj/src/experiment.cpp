#include "qcluster/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "qcluster/baseline.hpp"
#include "qcluster/hash.hpp"
#include "qcluster/trace.hpp"

namespace qcluster {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_load(double load) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", load);
    return buf;
}

ThresholdRule parse_rule(const std::string& s) {
    if (s == "adaptive") return ThresholdRule::kAdaptive;
    if (s == "arithmetic-mean") return ThresholdRule::kArithmeticMean;
    if (s == "geometric-mean") return ThresholdRule::kGeometricMean;
    if (s == "harmonic-mean") return ThresholdRule::kHarmonicMean;
    throw std::invalid_argument("unknown threshold rule: " + s);
}

std::string rule_string(ThresholdRule r) {
    switch (r) {
        case ThresholdRule::kAdaptive: return "adaptive";
        case ThresholdRule::kArithmeticMean: return "arithmetic-mean";
        case ThresholdRule::kGeometricMean: return "geometric-mean";
        case ThresholdRule::kHarmonicMean: return "harmonic-mean";
    }
    return "?";
}

json cell_to_json(const CellConfig& c) {
    json j;
    j["version"] = kVersion;
    j["experiment"] = c.experiment;
    j["scheduler"] = c.scheduler;
    j["load"] = c.load;
    j["seed"] = c.seed;
    j["port"] = {{"queues", c.port.num_queues},
                 {"line_rate", c.port.line_rate},
                 {"buffer_bytes", c.port.buffer_bytes},
                 {"ecn_threshold_bytes", c.port.ecn_threshold},
                 {"mtu", c.port.mtu}};
    j["source"] = {{"access_rate", c.source.access_rate},
                   {"source_ports", c.source.source_ports},
                   {"window_bytes", c.source.window_bytes},
                   {"window_gap", c.source.window_gap}};
    j["workload"] = {{"num_flows", c.num_flows},
                     {"cdf_name", c.cdf_name},
                     {"cdf_points", c.cdf_points},
                     {"log_interpolation", c.log_interpolation},
                     {"web_search_buckets", c.web_search_buckets},
                     {"deadlines", c.deadlines},
                     {"deadline_cutoff_bytes", c.deadline_cutoff},
                     {"deadline_slack_factor", c.deadline_slack_factor}};
    j["sketch"] = {{"rows", c.sketch.rows},
                   {"cols", c.sketch.cols},
                   {"delta_t_message", c.sketch.delta_t_message},
                   {"delta_t_flowlet", c.sketch.delta_t_flowlet},
                   {"seed", c.sketch.seed}};
    j["cluster"] = {{"threshold_rule", rule_string(c.cluster.threshold_rule)},
                    {"alpha", c.cluster.alpha},
                    {"alpha_step", c.cluster.alpha_step},
                    {"alpha_min", c.cluster.alpha_min},
                    {"alpha_max", c.cluster.alpha_max},
                    {"imbalance_tolerance", c.cluster.imbalance_tolerance},
                    {"control_interval", c.cluster.control_interval},
                    {"decay", c.cluster.decay},
                    {"dataplane", c.cluster.dataplane_mode},
                    {"control_plane_period", c.cluster.control_plane_period},
                    {"initial_weight", c.cluster.initial_weight},
                    {"use_decayed_size", c.cluster.use_decayed_size}};
    j["pda"] = c.pda;
    j["deadline_queues"] = c.deadline_queues;
    j["ddl_edf"] = c.ddl_edf;
    return j;
}

void cell_from_json(const json& j, CellConfig& c) {
    c.experiment = j.value("experiment", c.experiment);
    c.scheduler = j.value("scheduler", c.scheduler);
    c.load = j.value("load", c.load);
    c.seed = j.value("seed", c.seed);
    if (j.contains("port")) {
        const auto& p = j.at("port");
        c.port.num_queues = p.value("queues", c.port.num_queues);
        c.port.line_rate = p.value("line_rate", c.port.line_rate);
        if (p.contains("line_rate_gbps")) c.port.line_rate = p.at("line_rate_gbps").get<double>() * 1e9;
        c.port.buffer_bytes = p.value("buffer_bytes", c.port.buffer_bytes);
        c.port.ecn_threshold = p.value("ecn_threshold_bytes", c.port.ecn_threshold);
        c.port.mtu = p.value("mtu", c.port.mtu);
    }
    if (j.contains("source")) {
        const auto& s = j.at("source");
        c.source.access_rate = s.value("access_rate", c.source.access_rate);
        if (s.contains("access_rate_gbps")) c.source.access_rate = s.at("access_rate_gbps").get<double>() * 1e9;
        c.source.source_ports = s.value("source_ports", c.source.source_ports);
        c.source.window_bytes = s.value("window_bytes", c.source.window_bytes);
        c.source.window_gap = s.value("window_gap", c.source.window_gap);
    }
    if (j.contains("workload")) {
        const auto& w = j.at("workload");
        c.num_flows = w.value("num_flows", c.num_flows);
        c.cdf_name = w.value("cdf_name", c.cdf_name);
        if (w.contains("cdf_points")) {
            c.cdf_points = w.at("cdf_points")
                               .get<std::vector<std::pair<std::uint64_t, double>>>();
        }
        if (w.contains("cdf")) {
            // Path form: inline the breakpoints so manifests are self-contained.
            SizeCdf cdf = SizeCdf::from_file(w.at("cdf").get<std::string>());
            c.cdf_name = cdf.name();
            c.cdf_points.clear();
            std::ostringstream tmp;
            cdf.save(tmp);
            std::istringstream in(tmp.str());
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#') continue;
                std::istringstream ls(line);
                std::uint64_t size;
                double prob;
                ls >> size >> prob;
                c.cdf_points.emplace_back(size, prob);
            }
        }
        c.log_interpolation = w.value("log_interpolation", c.log_interpolation);
        c.web_search_buckets = w.value("web_search_buckets", c.web_search_buckets);
        c.deadlines = w.value("deadlines", c.deadlines);
        c.deadline_cutoff = w.value("deadline_cutoff_bytes", c.deadline_cutoff);
        c.deadline_slack_factor = w.value("deadline_slack_factor", c.deadline_slack_factor);
    }
    if (j.contains("sketch")) {
        const auto& s = j.at("sketch");
        c.sketch.rows = s.value("rows", c.sketch.rows);
        c.sketch.cols = s.value("cols", c.sketch.cols);
        c.sketch.delta_t_message = s.value("delta_t_message", c.sketch.delta_t_message);
        c.sketch.delta_t_flowlet = s.value("delta_t_flowlet", c.sketch.delta_t_flowlet);
        c.sketch.seed = s.value("seed", c.sketch.seed);
    }
    if (j.contains("cluster")) {
        const auto& cl = j.at("cluster");
        if (cl.contains("threshold_rule")) {
            c.cluster.threshold_rule = parse_rule(cl.at("threshold_rule").get<std::string>());
        }
        c.cluster.alpha = cl.value("alpha", c.cluster.alpha);
        c.cluster.alpha_step = cl.value("alpha_step", c.cluster.alpha_step);
        c.cluster.alpha_min = cl.value("alpha_min", c.cluster.alpha_min);
        c.cluster.alpha_max = cl.value("alpha_max", c.cluster.alpha_max);
        c.cluster.imbalance_tolerance =
            cl.value("imbalance_tolerance", c.cluster.imbalance_tolerance);
        c.cluster.control_interval = cl.value("control_interval", c.cluster.control_interval);
        c.cluster.decay = cl.value("decay", c.cluster.decay);
        c.cluster.dataplane_mode = cl.value("dataplane", c.cluster.dataplane_mode);
        c.cluster.control_plane_period =
            cl.value("control_plane_period", c.cluster.control_plane_period);
        c.cluster.initial_weight = cl.value("initial_weight", c.cluster.initial_weight);
        c.cluster.use_decayed_size = cl.value("use_decayed_size", c.cluster.use_decayed_size);
    }
    c.pda = j.value("pda", c.pda);
    c.deadline_queues = j.value("deadline_queues", c.deadline_queues);
    c.ddl_edf = j.value("ddl_edf", c.ddl_edf);
    c.cluster.num_queues = c.port.num_queues;
}

}  // namespace

std::string CellConfig::cell_name() const {
    return scheduler + "_load" + format_load(load) + "_seed" + std::to_string(seed);
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("config parse error in " + path + ": " + e.what());
    }
    ExperimentConfig cfg;
    cfg.base.experiment = j.value("name", fs::path(path).stem().string());
    cell_from_json(j, cfg.base);
    if (!j.contains("schedulers") || !j.contains("loads") || !j.contains("seeds")) {
        throw std::runtime_error(path + ": config needs schedulers, loads and seeds arrays");
    }
    cfg.schedulers = j.at("schedulers").get<std::vector<std::string>>();
    cfg.loads = j.at("loads").get<std::vector<double>>();
    cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (cfg.base.cdf_points.empty()) {
        throw std::runtime_error(path + ": workload.cdf (or cdf_points) is required");
    }
    for (double l : cfg.loads) {
        if (l <= 0.0 || l >= 1.0) throw std::runtime_error("loads must be in (0,1)");
    }
    return cfg;
}

std::string cell_manifest_json(const CellConfig& cell) { return cell_to_json(cell).dump(2) + "\n"; }

CellConfig parse_cell_manifest(const std::string& json_text) {
    CellConfig c;
    json j = json::parse(json_text);
    cell_from_json(j, c);
    return c;
}

std::vector<FlowSpec> cell_schedule(const CellConfig& cell) {
    SizeCdf cdf(cell.cdf_name, cell.cdf_points, cell.log_interpolation);
    Rng rng(mix64(cell.seed));
    auto flows = generate_flows(cdf, cell.load, cell.port.line_rate, cell.num_flows, rng);
    if (cell.deadlines) {
        DeadlineParams params;
        params.cutoff_bytes = cell.deadline_cutoff;
        params.slack_mean_factor = cell.deadline_slack_factor;
        params.line_rate = cell.port.line_rate;
        Rng deadline_rng(mix64(cell.seed ^ 0xddddddddULL));
        assign_deadlines(flows, params, deadline_rng);
    }
    return flows;
}

namespace {

QClusterOptions qcluster_options(const CellConfig& cell, PolicyName policy) {
    QClusterOptions opt;
    opt.policy = policy;
    opt.sketch = cell.sketch;
    opt.cluster = cell.cluster;
    opt.cluster.num_queues = cell.port.num_queues;
    opt.pda_enabled = cell.pda;
    opt.mtu = cell.port.mtu;
    opt.deadline_queues = cell.deadline_queues;
    opt.ddl_edf = cell.ddl_edf;
    return opt;
}

std::vector<double> parse_threshold_list(const std::string& list) {
    std::vector<double> t;
    std::istringstream ls(list);
    std::string field;
    while (std::getline(ls, field, ',')) {
        t.push_back(std::stod(field));
    }
    return t;
}

}  // namespace

std::vector<double> opt_static_thresholds(const CellConfig& cell,
                                          const std::vector<FlowSpec>& flows) {
    const int k = cell.port.num_queues;
    double best_fct = kInf;
    std::vector<double> best;
    for (double w0 : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
        for (double g : {2.0, 4.0, 8.0}) {
            std::vector<double> t(static_cast<std::size_t>(k - 1));
            for (int i = 0; i < k - 1; ++i) {
                t[static_cast<std::size_t>(i)] =
                    w0 * static_cast<double>(cell.port.mtu) * std::pow(g, i);
            }
            StaticLasScheduler sched(k, t);
            TraceLog log = simulate(flows, cell.port, cell.source, sched);
            auto stats = fct_stats(log.flows, {});
            if (!stats.empty() && stats.front().mean < best_fct) {
                best_fct = stats.front().mean;
                best = t;
            }
        }
    }
    if (best.empty()) throw std::runtime_error("threshold sweep found no complete flows");
    return best;
}

std::unique_ptr<Scheduler> make_scheduler(const CellConfig& cell,
                                          const std::vector<FlowSpec>& flows) {
    const std::string& name = cell.scheduler;
    if (name == "FIFO") return std::make_unique<FifoScheduler>();
    if (name == "ideal-FQ") return std::make_unique<IdealFqScheduler>(cell.port.line_rate);
    if (name == "ideal-SRPT") return std::make_unique<IdealSrptScheduler>();
    if (name == "static-LAS-worst") {
        return std::make_unique<StaticLasScheduler>(
            cell.port.num_queues,
            worst_case_thresholds(flows, cell.port.num_queues, cell.port.mtu));
    }
    if (name == "static-LAS-opt") {
        return std::make_unique<StaticLasScheduler>(cell.port.num_queues,
                                                    opt_static_thresholds(cell, flows));
    }
    if (name.rfind("static-LAS:", 0) == 0) {
        return std::make_unique<StaticLasScheduler>(
            cell.port.num_queues, parse_threshold_list(name.substr(std::string("static-LAS:").size())));
    }
    return make_qcluster(qcluster_options(cell, parse_policy_name(name)));
}

TraceLog run_trace(const CellConfig& cell, const std::vector<FlowSpec>& flows) {
    auto sched = make_scheduler(cell, flows);
    return simulate(flows, cell.port, cell.source, *sched);
}

TraceLog run_cell_trace(const CellConfig& cell) {
    auto flows = cell_schedule(cell);
    return run_trace(cell, flows);
}

CellResult run_cell(const CellConfig& cell, const std::string& dir) {
    CellResult res;
    res.name = cell.cell_name();
    try {
        fs::create_directories(dir);
        auto flows = cell_schedule(cell);
        {
            std::ofstream out(dir + "/manifest.json");
            out << cell_manifest_json(cell);
        }
        {
            std::ofstream out(dir + "/schedule.csv");
            save_schedule(flows, out);
        }
        TraceLog log = run_trace(cell, flows);
        res.metrics = summarize(log, default_buckets(cell.web_search_buckets));
        {
            std::ofstream out(dir + "/packets.csv");
            write_packet_csv(log, out);
        }
        {
            std::ofstream out(dir + "/flows.csv");
            write_flow_csv(log, out);
        }
        if (!log.threshold_log.empty()) {
            std::ofstream out(dir + "/thresholds.csv");
            write_threshold_csv(log, out);
        }
        {
            std::ofstream out(dir + "/metrics.csv");
            write_metrics_csv(res.metrics, out);
        }
        res.ok = true;
    } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
    }
    return res;
}

namespace {

const std::vector<std::string>& summary_columns() {
    static const std::vector<std::string> cols = {
        "fct_mean_all",  "fct_p99_all",    "fct_mean_small", "fct_p99_small",
        "fct_mean_mid",  "fct_mean_large", "jain_index",     "app_throughput",
        "disorder_total", "drops",         "delivered",      "unsound_flowlet_starts",
        "max_sojourn"};
    return cols;
}

void write_summary(const std::vector<CellConfig>& cells, const std::vector<CellResult>& results,
                   const std::string& out_dir) {
    std::ofstream out(out_dir + "/summary.csv");
    out << "scheduler,load,seed,status";
    for (const auto& col : summary_columns()) out << ',' << col;
    out << '\n';
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out << cells[i].scheduler << ',' << format_load(cells[i].load) << ',' << cells[i].seed
            << ',' << (results[i].ok ? "ok" : "failed");
        for (const auto& col : summary_columns()) {
            out << ',';
            auto it = results[i].metrics.find(col);
            if (it != results[i].metrics.end()) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.9g", it->second);
                out << buf;
            }
        }
        out << '\n';
    }
}

}  // namespace

std::vector<CellResult> run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                       const std::string& filter, int parallelism) {
    std::vector<CellConfig> cells;
    for (const auto& sched : cfg.schedulers) {
        for (double load : cfg.loads) {
            for (std::uint64_t seed : cfg.seeds) {
                CellConfig cell = cfg.base;
                cell.scheduler = sched;
                cell.load = load;
                cell.seed = seed;
                cell.cluster.num_queues = cell.port.num_queues;
                if (filter.empty() || cell.cell_name().find(filter) != std::string::npos) {
                    cells.push_back(cell);
                }
            }
        }
    }
    if (cells.empty()) throw std::runtime_error("no cells match the filter");

    fs::create_directories(out_dir);
    std::vector<CellResult> results(cells.size());
    std::atomic<std::size_t> next{0};
    int workers = std::max(1, std::min<int>(parallelism, static_cast<int>(cells.size())));
    auto work = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            results[i] = run_cell(cells[i], out_dir + "/" + cells[i].cell_name());
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    write_summary(cells, results, out_dir);
    return results;
}

std::vector<CellResult> replay_schedule(const CellConfig& base,
                                        const std::vector<std::string>& schedulers,
                                        const std::string& schedule_csv_path,
                                        const std::string& out_dir) {
    std::ifstream in(schedule_csv_path);
    if (!in) throw std::runtime_error("cannot open schedule: " + schedule_csv_path);
    auto flows = load_schedule(in);

    fs::create_directories(out_dir);
    std::vector<CellResult> results;
    std::vector<TraceLog> logs;
    for (const auto& name : schedulers) {
        CellConfig cell = base;
        cell.scheduler = name;
        CellResult res;
        res.name = name;
        try {
            TraceLog log = run_trace(cell, flows);
            res.metrics = summarize(log, default_buckets(cell.web_search_buckets));
            std::ofstream out(out_dir + "/metrics_" + name + ".csv");
            write_metrics_csv(res.metrics, out);
            logs.push_back(std::move(log));
            res.ok = true;
        } catch (const std::exception& e) {
            res.error = e.what();
            logs.emplace_back();
        }
        results.push_back(std::move(res));
    }

    // Per-flow comparison joined on flow id; deltas are against the first
    // scheduler.
    std::ofstream out(out_dir + "/comparison.csv");
    out << "flow_id,size";
    for (const auto& name : schedulers) out << ",fct_" << name;
    for (std::size_t s = 1; s < schedulers.size(); ++s) out << ",delta_" << schedulers[s];
    out << '\n';
    out.precision(9);
    for (std::size_t f = 0; f < flows.size(); ++f) {
        out << flows[f].id << ',' << flows[f].size;
        std::vector<double> fcts;
        for (const auto& log : logs) {
            if (f < log.flows.size() && log.flows[f].complete()) {
                fcts.push_back(log.flows[f].fct());
                out << ',' << log.flows[f].fct();
            } else {
                fcts.push_back(-1.0);
                out << ',';
            }
        }
        for (std::size_t s = 1; s < fcts.size(); ++s) {
            out << ',';
            if (fcts[s] >= 0.0 && fcts[0] >= 0.0) out << fcts[s] - fcts[0];
        }
        out << '\n';
    }
    return results;
}

}  // namespace qcluster
