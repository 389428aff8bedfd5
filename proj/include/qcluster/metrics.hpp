#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcluster/packet.hpp"

namespace qcluster {

// Half-open flow-size range (lo, hi]; hi == 0 means unbounded.
struct SizeBucket {
    std::string name;
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    bool contains(std::uint64_t size) const { return size > lo && (hi == 0 || size <= hi); }
};

// small (0,1KB], mid (1KB,10KB], large (10KB,inf); web-search-style workloads
// have no sub-1KB flows, so their buckets shift to 10KB/100KB boundaries.
std::vector<SizeBucket> default_buckets(bool web_search_style);

struct FctSummary {
    std::string bucket;
    std::uint64_t count = 0;
    double mean = 0.0;
    double p99 = 0.0;
};

// Mean and 99th-percentile FCT over completed flows, overall and per bucket.
// Empty buckets are omitted. p99 uses rank floor(0.99*n)+1 (the max for
// n <= 100).
std::vector<FctSummary> fct_stats(const std::vector<FlowRecord>& flows,
                                  const std::vector<SizeBucket>& buckets);

// (sum x)^2 / (n * sum x^2); requires at least one positive entry.
double jain_index(const std::vector<double>& throughputs);

// Per-flow throughput (size/fct) averaged within order-of-magnitude size
// groups; the Jain index over those group averages. nullopt when no flow
// completed.
std::optional<double> jain_index_by_magnitude(const std::vector<FlowRecord>& flows);

// Fraction of deadline flows that completed within their deadline; nullopt
// when the run had none.
std::optional<double> app_throughput(const std::vector<FlowRecord>& flows);

struct DisorderReport {
    std::vector<std::uint32_t> per_flow;
    std::uint64_t total = 0;
};

// A disorder event is a delivered packet whose seq is below the highest seq
// already delivered for its flow; gaps from drops do not count.
DisorderReport disorder_counts(const TraceLog& log);

// Flat key/value metric rows for one run.
std::map<std::string, double> summarize(const TraceLog& log, const std::vector<SizeBucket>& buckets);

}  // namespace qcluster
