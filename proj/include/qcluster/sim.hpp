#pragma once

#include <cstdint>
#include <vector>

#include "qcluster/packet.hpp"
#include "qcluster/scheduler.hpp"

namespace qcluster {

struct PortConfig {
    int num_queues = 8;
    double line_rate = 10e9;          // bits/s
    std::uint64_t buffer_bytes = 1 << 20;
    std::uint64_t ecn_threshold = 0;  // 0 = no marking
    std::uint32_t mtu = 1500;
};

// How flows reach the bottleneck. With source_ports == 0 every flow's packets
// arrive paced at access_rate from its own source; otherwise flows hash onto
// that many FIFO source links which serialize the paced streams. A nonzero
// window_bytes splits each flow into bursts of that many bytes separated by
// window_gap (an application pause, not congestion control): gaps longer than
// the flowlet window let a flow re-cluster as its sent count grows.
struct SourceModel {
    double access_rate = 10e9;  // bits/s
    int source_ports = 0;
    std::uint64_t window_bytes = 0;  // 0 = one continuous burst
    double window_gap = 0.0;         // seconds between bursts
};

// Splits flows into MTU-sized packets and computes their bottleneck arrival
// times under the source model.
std::vector<PacketRecord> packetize(const std::vector<FlowSpec>& flows, const PortConfig& port,
                                    const SourceModel& src);

// Deterministic event-driven run of one bottleneck egress port. Simulates
// until all packets are delivered or dropped, or until `horizon`.
TraceLog simulate(const std::vector<FlowSpec>& flows, const PortConfig& port,
                  const SourceModel& src, Scheduler& sched, double horizon = kInf);

// FNV-1a over the packet trace; equal traces hash equal.
std::uint64_t trace_hash(const TraceLog& log);

}  // namespace qcluster
