#pragma once

#include <cstdint>
#include <vector>

#include "qcluster/types.hpp"

namespace qcluster {

// Declarative description of one flow before simulation.
struct FlowSpec {
    FlowId id = 0;
    double start = 0.0;
    std::uint64_t size = 0;          // bytes
    double deadline = kNoDeadline;   // relative to start; kNoDeadline if none
};

// One simulated packet. Filled in as the run progresses.
struct PacketRecord {
    FlowId flow_id = 0;
    std::uint32_t seq = 0;       // 0-based, strictly increasing per flow
    std::uint32_t size = 0;      // bytes
    double arrival = 0.0;        // at the bottleneck port
    double deadline = kNoDeadline;
    int queue = kUnsetQueue;     // queue it was enqueued to
    double departure = -1.0;     // transmission-complete time; -1 while pending
    bool dropped = false;
    bool ecn_marked = false;
};

// Ground-truth per-flow bookkeeping for metrics and oracles.
struct FlowRecord {
    FlowId id = 0;
    std::uint64_t size = 0;
    double start = 0.0;          // first packet arrival
    double end = -1.0;           // last packet departure
    double deadline = kNoDeadline;
    std::uint32_t packets = 0;
    std::uint32_t delivered = 0;
    std::uint32_t dropped = 0;
    std::uint32_t disorder_count = 0;  // filled from the packet trace
    double fct() const { return end - start; }
    bool complete() const { return delivered == packets && packets > 0; }
    bool deadline_met() const { return deadline != kNoDeadline && end >= 0.0 && fct() <= deadline; }
};

struct ThresholdSnapshot {
    double epoch = 0.0;
    std::vector<double> thresholds;
};

// Everything a run produces.
struct TraceLog {
    std::vector<PacketRecord> packets;
    std::vector<FlowRecord> flows;
    std::vector<ThresholdSnapshot> threshold_log;
    std::uint64_t drops = 0;
    std::uint64_t delivered = 0;
    std::uint64_t unsound_flowlet_starts = 0;
    double max_sojourn = 0.0;  // worst packet arrival-to-departure time
    double horizon = 0.0;      // simulated time at the end of the run
};

}  // namespace qcluster
