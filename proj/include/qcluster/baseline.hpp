#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <queue>
#include <set>
#include <unordered_map>
#include <vector>

#include "qcluster/scheduler.hpp"

namespace qcluster {

// Single FIFO queue.
class FifoScheduler : public Scheduler {
  public:
    int enqueue(std::size_t pkt, const PacketRecord& rec, double now) override;
    bool dequeue(std::size_t& pkt_out, double now) override;
    bool empty() const override { return q_.empty(); }

  private:
    std::deque<std::size_t> q_;
};

// Multi-queue LAS with fixed byte boundaries (PIAS-style): a packet goes to
// queue i when the flow's exact bytes-sent count falls in
// [thres_{i-1}, thres_i); strict-priority dequeue.
class StaticLasScheduler : public Scheduler {
  public:
    StaticLasScheduler(int num_queues, std::vector<double> thresholds);

    int enqueue(std::size_t pkt, const PacketRecord& rec, double now) override;
    bool dequeue(std::size_t& pkt_out, double now) override;
    bool empty() const override { return queues_.all_empty(); }

    const std::vector<double>& thresholds() const { return thresholds_; }

  private:
    std::vector<double> thresholds_;
    MultiQueue queues_;
    std::unordered_map<FlowId, std::uint64_t> bytes_sent_;
};

// Mis-set threshold preset: about 60% of all packets land in the first queue
// and 30% in the last, derived from the schedule's bytes-sent quantiles.
std::vector<double> worst_case_thresholds(const std::vector<FlowSpec>& flows, int num_queues,
                                          std::uint32_t mtu);

// Idealized fair queueing: every packet is stamped with its finish time under
// bit-by-bit round robin (tracked with an exact fluid virtual clock) and
// packets depart in stamp order.
class IdealFqScheduler : public Scheduler {
  public:
    explicit IdealFqScheduler(double line_rate_bps) : rate_(line_rate_bps) {}

    int enqueue(std::size_t pkt, const PacketRecord& rec, double now) override;
    bool dequeue(std::size_t& pkt_out, double now) override;
    bool empty() const override { return heap_.empty(); }

  private:
    void advance_virtual_clock(double now);

    struct Stamped {
        double finish;
        FlowId flow;
        std::uint32_t seq;
        std::size_t pkt;
        bool operator>(const Stamped& o) const {
            if (finish != o.finish) return finish > o.finish;
            if (flow != o.flow) return flow > o.flow;
            return seq > o.seq;
        }
    };

    double rate_;
    double vtime_ = 0.0;       // bytes of service per backlogged flow
    double last_real_ = 0.0;
    std::unordered_map<FlowId, double> flow_finish_;     // last stamp per flow
    std::multiset<double> backlogged_;                   // finish stamps of backlogged flows
    std::priority_queue<Stamped, std::vector<Stamped>, std::greater<>> heap_;
};

// Idealized SRPT: one logical preemptive queue; always serves the flow with
// the least remaining (declared minus delivered) bytes.
class IdealSrptScheduler : public Scheduler {
  public:
    void bind_flows(const std::vector<FlowSpec>& flows) override;
    int enqueue(std::size_t pkt, const PacketRecord& rec, double now) override;
    bool dequeue(std::size_t& pkt_out, double now) override;
    bool empty() const override { return ready_.empty(); }
    void on_departure(std::size_t pkt, const PacketRecord& rec, double now) override;

  private:
    struct FlowQueue {
        std::deque<std::size_t> packets;
        std::uint64_t remaining = 0;  // declared minus delivered
    };
    std::unordered_map<FlowId, FlowQueue> flows_;
    std::set<std::pair<std::uint64_t, FlowId>> ready_;  // (remaining, flow), queued flows only
};

}  // namespace qcluster
