#include "qcluster/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qcluster {

std::vector<SizeBucket> default_buckets(bool web_search_style) {
    if (web_search_style) {
        return {{"small", 0, 10'000}, {"mid", 10'000, 100'000}, {"large", 100'000, 0}};
    }
    return {{"small", 0, 1'000}, {"mid", 1'000, 10'000}, {"large", 10'000, 0}};
}

namespace {

double percentile99(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    std::size_t rank = static_cast<std::size_t>(0.99 * static_cast<double>(v.size())) + 1;
    rank = std::min(rank, v.size());
    return v[rank - 1];
}

FctSummary summarize_bucket(const std::string& name, std::vector<double>& fcts) {
    FctSummary s;
    s.bucket = name;
    s.count = fcts.size();
    s.mean = std::accumulate(fcts.begin(), fcts.end(), 0.0) / static_cast<double>(fcts.size());
    s.p99 = percentile99(fcts);
    return s;
}

}  // namespace

std::vector<FctSummary> fct_stats(const std::vector<FlowRecord>& flows,
                                  const std::vector<SizeBucket>& buckets) {
    std::vector<FctSummary> out;
    std::vector<double> all;
    for (const auto& f : flows) {
        if (f.complete()) all.push_back(f.fct());
    }
    if (all.empty()) return out;
    out.push_back(summarize_bucket("all", all));
    for (const auto& b : buckets) {
        std::vector<double> fcts;
        for (const auto& f : flows) {
            if (f.complete() && b.contains(f.size)) fcts.push_back(f.fct());
        }
        if (!fcts.empty()) out.push_back(summarize_bucket(b.name, fcts));
    }
    return out;
}

double jain_index(const std::vector<double>& throughputs) {
    if (throughputs.empty()) throw std::invalid_argument("jain_index of empty set");
    double sum = 0.0, sum_sq = 0.0;
    for (double x : throughputs) {
        if (x < 0.0) throw std::invalid_argument("jain_index needs nonnegative values");
        sum += x;
        sum_sq += x * x;
    }
    if (sum_sq == 0.0) throw std::invalid_argument("jain_index undefined for all-zero input");
    return sum * sum / (static_cast<double>(throughputs.size()) * sum_sq);
}

std::optional<double> jain_index_by_magnitude(const std::vector<FlowRecord>& flows) {
    std::map<int, std::pair<double, std::uint64_t>> groups;  // magnitude -> (sum, n)
    for (const auto& f : flows) {
        if (!f.complete() || f.fct() <= 0.0) continue;
        int mag = static_cast<int>(std::floor(std::log10(static_cast<double>(f.size))));
        auto& g = groups[mag];
        g.first += static_cast<double>(f.size) / f.fct();
        g.second += 1;
    }
    if (groups.empty()) return std::nullopt;
    std::vector<double> avg;
    for (const auto& [mag, g] : groups) {
        avg.push_back(g.first / static_cast<double>(g.second));
    }
    return jain_index(avg);
}

std::optional<double> app_throughput(const std::vector<FlowRecord>& flows) {
    std::uint64_t total = 0, met = 0;
    for (const auto& f : flows) {
        if (f.deadline == kNoDeadline) continue;
        ++total;
        if (f.complete() && f.deadline_met()) ++met;
    }
    if (total == 0) return std::nullopt;
    return static_cast<double>(met) / static_cast<double>(total);
}

DisorderReport disorder_counts(const TraceLog& log) {
    DisorderReport rep;
    rep.per_flow.assign(log.flows.size(), 0);

    std::vector<std::size_t> delivered;
    delivered.reserve(log.packets.size());
    for (std::size_t i = 0; i < log.packets.size(); ++i) {
        if (log.packets[i].departure >= 0.0) delivered.push_back(i);
    }
    std::sort(delivered.begin(), delivered.end(), [&](std::size_t a, std::size_t b) {
        if (log.packets[a].departure != log.packets[b].departure)
            return log.packets[a].departure < log.packets[b].departure;
        return log.packets[a].seq < log.packets[b].seq;
    });

    std::vector<std::int64_t> max_seq(log.flows.size(), -1);
    for (std::size_t i : delivered) {
        const PacketRecord& rec = log.packets[i];
        auto f = static_cast<std::size_t>(rec.flow_id);
        if (static_cast<std::int64_t>(rec.seq) < max_seq[f]) {
            rep.per_flow[f] += 1;
            rep.total += 1;
        } else {
            max_seq[f] = rec.seq;
        }
    }
    return rep;
}

std::map<std::string, double> summarize(const TraceLog& log,
                                        const std::vector<SizeBucket>& buckets) {
    std::map<std::string, double> m;
    for (const auto& s : fct_stats(log.flows, buckets)) {
        m["fct_mean_" + s.bucket] = s.mean;
        m["fct_p99_" + s.bucket] = s.p99;
        m["flows_" + s.bucket] = static_cast<double>(s.count);
    }
    if (auto j = jain_index_by_magnitude(log.flows)) m["jain_index"] = *j;
    if (auto a = app_throughput(log.flows)) m["app_throughput"] = *a;
    auto dis = disorder_counts(log);
    m["disorder_total"] = static_cast<double>(dis.total);
    m["delivered"] = static_cast<double>(log.delivered);
    m["drops"] = static_cast<double>(log.drops);
    m["unsound_flowlet_starts"] = static_cast<double>(log.unsound_flowlet_starts);
    m["max_sojourn"] = log.max_sojourn;
    return m;
}

}  // namespace qcluster
