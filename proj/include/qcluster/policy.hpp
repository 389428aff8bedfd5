#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcluster/engine.hpp"
#include "qcluster/types.hpp"

namespace qcluster {

enum class PolicyName { kQcSrpt, kQcLas, kQcFq, kQcDdl };

enum class DequeueKind { kStrictPriority, kWeightedRoundRobin, kHybridDeadlineFirst };

// How packets map onto weights, clusters, and the dequeue discipline for one
// scheduling problem.
struct PolicySpec {
    PolicyName name;
    PolicyKind pda_kind;
    SizeStrategy size_strategy;
    DequeueKind dequeue;
    bool counts_packets;      // sketch counts MTU-sized packet equivalents
    bool needs_flow_sizes;    // remaining-size weights need declared sizes
    bool has_deadline_class;  // deadline flows use the high-priority class
};

PolicySpec policy_spec(PolicyName name);
PolicyName parse_policy_name(const std::string& s);
std::string policy_name_string(PolicyName name);

// Sketch increment for one packet under this policy.
std::uint64_t sketch_increment(const PolicySpec& spec, std::uint32_t packet_bytes,
                               std::uint32_t mtu);

// Clustering weight of one packet. `sent_estimate` is the sketch estimate of
// bytes (or packet equivalents) sent before this packet.
//   QC-LAS:  bytes sent so far
//   QC-FQ:   packets sent so far
//   QC-SRPT: declared size minus bytes sent (floored at 0)
//   QC-DDL:  remaining time to deadline for deadline flows, SRPT weight for
//            the rest (deadline_class tells which engine the value feeds)
struct PolicyWeight {
    double value = 0.0;
    bool deadline_class = false;
};
PolicyWeight policy_weight(const PolicySpec& spec, std::uint64_t sent_estimate,
                           std::uint64_t declared_size, double flow_start, double deadline,
                           double now);

// Deficit round robin over k queues. Quanta derive from per-queue shares:
// the inverse-queue-weight form (share 1/m_i) or an explicit share vector
// (e.g. occupancy/weight); the smallest nonzero share maps to one MTU.
class DrrState {
  public:
    explicit DrrState(int num_queues) : deficit_(static_cast<std::size_t>(num_queues), 0.0) {}

    // Picks the queue to serve next. `head_bytes[i]` is the size of queue i's
    // head packet (0 when empty); `weights[i]` is the current queue weight
    // (share 1/m_i). Returns -1 when all queues are empty.
    int next(const std::vector<std::uint64_t>& head_bytes, const std::vector<double>& weights,
             std::uint32_t mtu);

    int next_by_share(const std::vector<std::uint64_t>& head_bytes,
                      const std::vector<double>& shares, std::uint32_t mtu);

    void on_served(int queue, std::uint64_t bytes) {
        deficit_[static_cast<std::size_t>(queue)] -= static_cast<double>(bytes);
    }

  private:
    std::vector<double> deficit_;
    int cursor_ = 0;
    bool turn_credited_ = false;
};

}  // namespace qcluster
