#include "qcluster/sim.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>
#include <queue>
#include <stdexcept>

#include "qcluster/metrics.hpp"

namespace qcluster {

std::vector<PacketRecord> packetize(const std::vector<FlowSpec>& flows, const PortConfig& port,
                                    const SourceModel& src) {
    std::vector<PacketRecord> packets;
    for (const auto& f : flows) {
        if (f.size == 0) throw std::invalid_argument("zero-size flow");
        std::uint64_t sent = 0;
        std::uint64_t window_left = src.window_bytes;
        std::uint32_t seq = 0;
        double offset = 0.0;
        while (sent < f.size) {
            std::uint32_t bytes = static_cast<std::uint32_t>(
                std::min<std::uint64_t>(port.mtu, f.size - sent));
            PacketRecord rec;
            rec.flow_id = f.id;
            rec.seq = seq++;
            rec.size = bytes;
            rec.deadline = f.deadline;
            rec.arrival = f.start + offset;  // paced at the access rate
            offset += serialization_time(bytes, src.access_rate);
            sent += bytes;
            packets.push_back(rec);
            if (src.window_bytes > 0 && sent < f.size) {
                window_left = window_left > bytes ? window_left - bytes : 0;
                if (window_left == 0) {
                    offset += src.window_gap;
                    window_left = src.window_bytes;
                }
            }
        }
    }

    std::stable_sort(packets.begin(), packets.end(), [](const auto& a, const auto& b) {
        if (a.arrival != b.arrival) return a.arrival < b.arrival;
        if (a.flow_id != b.flow_id) return a.flow_id < b.flow_id;
        return a.seq < b.seq;
    });

    if (src.source_ports > 0) {
        // Paced streams merge through FIFO source links before the bottleneck.
        std::vector<double> port_free(static_cast<std::size_t>(src.source_ports), 0.0);
        for (auto& rec : packets) {
            auto p = static_cast<std::size_t>(rec.flow_id %
                                              static_cast<std::uint64_t>(src.source_ports));
            double start = std::max(port_free[p], rec.arrival);
            port_free[p] = start + serialization_time(rec.size, src.access_rate);
            rec.arrival = port_free[p];
        }
        std::stable_sort(packets.begin(), packets.end(), [](const auto& a, const auto& b) {
            if (a.arrival != b.arrival) return a.arrival < b.arrival;
            if (a.flow_id != b.flow_id) return a.flow_id < b.flow_id;
            return a.seq < b.seq;
        });
    }
    return packets;
}

namespace {

enum class EventType { kArrival, kTxDone, kTick };

struct Event {
    double time;
    std::uint64_t order;  // insertion order breaks ties deterministically
    EventType type;
    std::size_t pkt = 0;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        return a.order > b.order;
    }
};

}  // namespace

TraceLog simulate(const std::vector<FlowSpec>& flows, const PortConfig& port,
                  const SourceModel& src, Scheduler& sched, double horizon) {
    TraceLog log;
    log.packets = packetize(flows, port, src);
    sched.bind_packets(&log.packets);
    sched.bind_flows(flows);

    log.flows.resize(flows.size());
    for (const auto& f : flows) {
        FlowRecord& fr = log.flows.at(static_cast<std::size_t>(f.id));
        fr.id = f.id;
        fr.size = f.size;
        fr.deadline = f.deadline;
        fr.start = kInf;
    }
    for (const auto& rec : log.packets) {
        FlowRecord& fr = log.flows.at(static_cast<std::size_t>(rec.flow_id));
        fr.packets += 1;
        fr.start = std::min(fr.start, rec.arrival);
    }

    std::priority_queue<Event, std::vector<Event>, EventAfter> events;
    std::uint64_t order = 0;
    for (std::size_t i = 0; i < log.packets.size(); ++i) {
        events.push({log.packets[i].arrival, order++, EventType::kArrival, i});
    }
    double tick = sched.control_interval();
    if (tick > 0.0 && !log.packets.empty()) {
        events.push({0.0, order++, EventType::kTick, 0});
    }

    std::uint64_t occupancy = 0;
    std::uint64_t pending_arrivals = log.packets.size();
    bool link_busy = false;
    double now = 0.0;

    auto start_tx = [&]() {
        if (link_busy) return;
        std::size_t pkt;
        if (!sched.dequeue(pkt, now)) return;
        link_busy = true;
        double done = now + serialization_time(log.packets[pkt].size, port.line_rate);
        events.push({done, order++, EventType::kTxDone, pkt});
    };

    while (!events.empty()) {
        Event ev = events.top();
        events.pop();
        if (ev.time > horizon) break;
        assert(ev.time >= now);
        now = ev.time;

        switch (ev.type) {
            case EventType::kArrival: {
                PacketRecord& rec = log.packets[ev.pkt];
                --pending_arrivals;
                if (occupancy + rec.size > port.buffer_bytes) {
                    rec.dropped = true;
                    ++log.drops;
                    log.flows[static_cast<std::size_t>(rec.flow_id)].dropped += 1;
                    break;
                }
                occupancy += rec.size;
                rec.queue = sched.enqueue(ev.pkt, rec, now);
                if (port.ecn_threshold > 0 && occupancy > port.ecn_threshold) {
                    rec.ecn_marked = true;
                }
                start_tx();
                break;
            }
            case EventType::kTxDone: {
                PacketRecord& rec = log.packets[ev.pkt];
                rec.departure = now;
                occupancy -= rec.size;
                ++log.delivered;
                FlowRecord& fr = log.flows[static_cast<std::size_t>(rec.flow_id)];
                fr.delivered += 1;
                fr.end = std::max(fr.end, now);
                log.max_sojourn = std::max(log.max_sojourn, now - rec.arrival);
                sched.on_departure(ev.pkt, rec, now);
                link_busy = false;
                start_tx();
                break;
            }
            case EventType::kTick: {
                sched.control_tick(now);
                if (pending_arrivals > 0 || !sched.empty() || link_busy) {
                    events.push({now + tick, order++, EventType::kTick, 0});
                }
                break;
            }
        }
    }
    log.horizon = now;
    log.unsound_flowlet_starts = sched.unsound_flowlet_starts();
    if (const auto* tl = sched.threshold_log()) log.threshold_log = *tl;

    auto disorder = disorder_counts(log);
    for (std::size_t i = 0; i < log.flows.size(); ++i) {
        log.flows[i].disorder_count = disorder.per_flow[i];
    }
    return log;
}

std::uint64_t trace_hash(const TraceLog& log) {
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&h](const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    for (const auto& rec : log.packets) {
        feed(&rec.flow_id, sizeof rec.flow_id);
        feed(&rec.seq, sizeof rec.seq);
        feed(&rec.size, sizeof rec.size);
        feed(&rec.arrival, sizeof rec.arrival);
        feed(&rec.queue, sizeof rec.queue);
        feed(&rec.departure, sizeof rec.departure);
        char flags = static_cast<char>((rec.dropped ? 1 : 0) | (rec.ecn_marked ? 2 : 0));
        feed(&flags, 1);
    }
    return h;
}

}  // namespace qcluster
