#include "qcluster/baseline.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace qcluster {

int FifoScheduler::enqueue(std::size_t pkt, const PacketRecord& rec, double now) {
    (void)rec;
    (void)now;
    q_.push_back(pkt);
    return 0;
}

bool FifoScheduler::dequeue(std::size_t& pkt_out, double now) {
    (void)now;
    if (q_.empty()) return false;
    pkt_out = q_.front();
    q_.pop_front();
    return true;
}

StaticLasScheduler::StaticLasScheduler(int num_queues, std::vector<double> thresholds)
    : thresholds_(std::move(thresholds)), queues_(num_queues) {
    if (static_cast<int>(thresholds_.size()) != num_queues - 1) {
        throw std::invalid_argument("need num_queues-1 thresholds");
    }
    if (!std::is_sorted(thresholds_.begin(), thresholds_.end())) {
        throw std::invalid_argument("thresholds must be nondecreasing");
    }
}

int StaticLasScheduler::enqueue(std::size_t pkt, const PacketRecord& rec, double now) {
    (void)now;
    double sent = static_cast<double>(bytes_sent_[rec.flow_id]);
    int q = static_cast<int>(
        std::upper_bound(thresholds_.begin(), thresholds_.end(), sent) - thresholds_.begin());
    bytes_sent_[rec.flow_id] += rec.size;
    queues_.push(q, pkt, rec.size);
    return q;
}

bool StaticLasScheduler::dequeue(std::size_t& pkt_out, double now) {
    (void)now;
    int q = queues_.first_nonempty();
    if (q < 0) return false;
    pkt_out = queues_.pop(q, record(queues_.front(q)).size);
    return true;
}

std::vector<double> worst_case_thresholds(const std::vector<FlowSpec>& flows, int num_queues,
                                          std::uint32_t mtu) {
    // Bytes-sent value seen by every packet of the schedule.
    std::vector<double> values;
    for (const auto& f : flows) {
        std::uint64_t sent = 0;
        while (sent < f.size) {
            values.push_back(static_cast<double>(sent));
            sent += std::min<std::uint64_t>(mtu, f.size - sent);
        }
    }
    std::sort(values.begin(), values.end());
    if (values.empty()) values.push_back(0.0);

    auto quantile = [&](double p) {
        std::size_t idx = static_cast<std::size_t>(p * static_cast<double>(values.size()));
        return values[std::min(idx, values.size() - 1)];
    };

    // First boundary at the 60% packet quantile, last at 70%, the rest spread
    // evenly between them.
    std::vector<double> t(static_cast<std::size_t>(num_queues - 1));
    for (int i = 0; i < num_queues - 1; ++i) {
        double p = 0.60 + 0.10 * static_cast<double>(i) / std::max(1, num_queues - 2);
        t[static_cast<std::size_t>(i)] = quantile(p);
    }
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = std::max(t[i], t[i - 1]);
    return t;
}

void IdealFqScheduler::advance_virtual_clock(double now) {
    // The fluid reference serves every backlogged flow at rate/n; walk across
    // flow-emptying instants between the last update and `now`.
    while (!backlogged_.empty()) {
        double n = static_cast<double>(backlogged_.size());
        double next_finish = *backlogged_.begin();
        double dt_needed = (next_finish - vtime_) * n * 8.0 / rate_;
        if (last_real_ + dt_needed > now) break;
        last_real_ += dt_needed;
        vtime_ = next_finish;
        while (!backlogged_.empty() && *backlogged_.begin() <= vtime_) {
            backlogged_.erase(backlogged_.begin());
        }
    }
    if (backlogged_.empty()) {
        last_real_ = now;
    } else {
        double n = static_cast<double>(backlogged_.size());
        vtime_ += (now - last_real_) * rate_ / (8.0 * n);
        last_real_ = now;
    }
}

int IdealFqScheduler::enqueue(std::size_t pkt, const PacketRecord& rec, double now) {
    advance_virtual_clock(now);
    auto [it, fresh] = flow_finish_.try_emplace(rec.flow_id, 0.0);
    double start = std::max(vtime_, it->second);
    bool was_backlogged = !fresh && it->second > vtime_;
    double finish = start + static_cast<double>(rec.size);
    if (was_backlogged) {
        auto pos = backlogged_.find(it->second);
        assert(pos != backlogged_.end());
        backlogged_.erase(pos);
    }
    it->second = finish;
    backlogged_.insert(finish);
    heap_.push({finish, rec.flow_id, rec.seq, pkt});
    return 0;
}

bool IdealFqScheduler::dequeue(std::size_t& pkt_out, double now) {
    (void)now;
    if (heap_.empty()) return false;
    pkt_out = heap_.top().pkt;
    heap_.pop();
    return true;
}

void IdealSrptScheduler::bind_flows(const std::vector<FlowSpec>& flows) {
    for (const auto& f : flows) {
        if (f.size == 0) throw std::invalid_argument("SRPT needs declared flow sizes");
        flows_[f.id].remaining = f.size;
    }
}

int IdealSrptScheduler::enqueue(std::size_t pkt, const PacketRecord& rec, double now) {
    (void)now;
    FlowQueue& fq = flows_.at(rec.flow_id);
    if (fq.packets.empty()) {
        ready_.insert({fq.remaining, rec.flow_id});
    }
    fq.packets.push_back(pkt);
    return 0;
}

bool IdealSrptScheduler::dequeue(std::size_t& pkt_out, double now) {
    (void)now;
    if (ready_.empty()) return false;
    FlowId flow = ready_.begin()->second;
    FlowQueue& fq = flows_.at(flow);
    pkt_out = fq.packets.front();
    fq.packets.pop_front();
    if (fq.packets.empty()) {
        ready_.erase(ready_.begin());
    }
    return true;
}

void IdealSrptScheduler::on_departure(std::size_t pkt, const PacketRecord& rec, double now) {
    (void)pkt;
    (void)now;
    FlowQueue& fq = flows_.at(rec.flow_id);
    bool queued = !fq.packets.empty();
    if (queued) ready_.erase({fq.remaining, rec.flow_id});
    fq.remaining -= rec.size;
    if (queued) ready_.insert({fq.remaining, rec.flow_id});
}

}  // namespace qcluster
