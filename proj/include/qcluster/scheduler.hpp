#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "qcluster/packet.hpp"

namespace qcluster {

// k FIFO queues addressed by priority index. Stores indices into the run's
// packet array.
class MultiQueue {
  public:
    explicit MultiQueue(int k) : queues_(static_cast<std::size_t>(k)) {}

    void push(int queue, std::size_t pkt, std::uint32_t bytes) {
        queues_[static_cast<std::size_t>(queue)].items.push_back(pkt);
        queues_[static_cast<std::size_t>(queue)].bytes += bytes;
    }
    std::size_t pop(int queue, std::uint32_t bytes) {
        auto& q = queues_[static_cast<std::size_t>(queue)];
        std::size_t idx = q.items.front();
        q.items.pop_front();
        q.bytes -= bytes;
        return idx;
    }
    bool empty(int queue) const { return queues_[static_cast<std::size_t>(queue)].items.empty(); }
    std::size_t front(int queue) const { return queues_[static_cast<std::size_t>(queue)].items.front(); }
    std::size_t packets(int queue) const { return queues_[static_cast<std::size_t>(queue)].items.size(); }
    std::uint64_t bytes(int queue) const { return queues_[static_cast<std::size_t>(queue)].bytes; }
    int num_queues() const { return static_cast<int>(queues_.size()); }

    bool all_empty() const {
        for (const auto& q : queues_) {
            if (!q.items.empty()) return false;
        }
        return true;
    }
    int first_nonempty() const {
        for (int i = 0; i < num_queues(); ++i) {
            if (!empty(i)) return i;
        }
        return -1;
    }

  private:
    struct Fifo {
        std::deque<std::size_t> items;
        std::uint64_t bytes = 0;
    };
    std::vector<Fifo> queues_;
};

// A scheduling discipline for one egress port. The simulator owns packet
// storage, the buffer budget, and the link; the scheduler owns queue
// structure and ordering decisions.
class Scheduler {
  public:
    virtual ~Scheduler() = default;

    // Oracle knowledge handed over before the run (declared sizes, deadlines).
    virtual void bind_flows(const std::vector<FlowSpec>& flows) { (void)flows; }

    // Packet storage lives in the simulator; schedulers read records by index.
    void bind_packets(const std::vector<PacketRecord>* packets) { packets_ = packets; }

    // Accepts the packet and returns the queue index recorded in the trace
    // (0 for single-structure schedulers).
    virtual int enqueue(std::size_t pkt, const PacketRecord& rec, double now) = 0;

    // Next packet to transmit, or nothing if idle. The simulator calls this
    // only when the link is free.
    virtual bool dequeue(std::size_t& pkt_out, double now) = 0;

    virtual bool empty() const = 0;

    // Periodic control work (cluster decay, alpha adaptation, ...).
    virtual void control_tick(double now) { (void)now; }
    virtual double control_interval() const { return 0.0; }  // 0 = no ticks

    virtual void on_departure(std::size_t pkt, const PacketRecord& rec, double now) {
        (void)pkt;
        (void)rec;
        (void)now;
    }

    // Threshold history for schedulers that publish one.
    virtual const std::vector<ThresholdSnapshot>* threshold_log() const { return nullptr; }
    virtual std::uint64_t unsound_flowlet_starts() const { return 0; }

  protected:
    const PacketRecord& record(std::size_t pkt) const { return (*packets_)[pkt]; }

  private:
    const std::vector<PacketRecord>* packets_ = nullptr;
};

}  // namespace qcluster
