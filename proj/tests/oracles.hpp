// Independent reference models used by the unit and acceptance suites. These
// deliberately avoid the library's data path: exact per-flow tracking instead
// of sketches, fluid service instead of packetized queues, enumeration
// instead of priority rules.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "qcluster/sketch.hpp"
#include "qcluster/types.hpp"

namespace qcluster::oracle {

// Exact per-flow message byte counts under the message-aging rule, plus
// per-bucket insertion logs so a query can be classified as collision-free.
class ExactMessageCounter {
  public:
    explicit ExactMessageCounter(const ScmSketch& sketch) : sketch_(&sketch) {
        logs_.resize(static_cast<std::size_t>(sketch.config().rows));
    }

    void insert(FlowId flow, std::uint64_t bytes, double now) {
        auto& st = state_[flow];
        if (!st.seen || now - st.last > sketch_->config().delta_t_message) {
            st.count = bytes;
            st.message_start = now;
        } else {
            st.count += bytes;
        }
        st.last = now;
        st.seen = true;
        for (int r = 0; r < sketch_->config().rows; ++r) {
            logs_[static_cast<std::size_t>(r)][sketch_->bucket_index(r, flow)].push_back(
                {now, flow});
        }
    }

    // Bytes of the flow's live message; 0 once it has aged out.
    std::uint64_t exact_count(FlowId flow, double now) const {
        auto it = state_.find(flow);
        if (it == state_.end()) return 0;
        if (now - it->second.last > sketch_->config().delta_t_message) return 0;
        return it->second.count;
    }

    // True when some row's bucket saw no other flow from just before this
    // flow's message began (one aging window back, so no stale residue could
    // have survived) until now.
    bool has_collision_free_row(FlowId flow) const {
        auto it = state_.find(flow);
        if (it == state_.end()) return true;
        double window_start = it->second.message_start - sketch_->config().delta_t_message;
        for (int r = 0; r < sketch_->config().rows; ++r) {
            const auto& log = logs_[static_cast<std::size_t>(r)].at(sketch_->bucket_index(r, flow));
            bool clean = true;
            for (const auto& entry : log) {
                if (entry.flow != flow && entry.time >= window_start) {
                    clean = false;
                    break;
                }
            }
            if (clean) return true;
        }
        return false;
    }

  private:
    struct FlowState {
        std::uint64_t count = 0;
        double message_start = 0.0;
        double last = 0.0;
        bool seen = false;
    };
    struct LogEntry {
        double time;
        FlowId flow;
    };

    const ScmSketch* sketch_;
    std::unordered_map<FlowId, FlowState> state_;
    std::vector<std::map<std::size_t, std::vector<LogEntry>>> logs_;
};

// Fluid processor sharing on one link: every backlogged flow drains at
// rate/n. Flows' bytes are available in full at their start times. Returns
// each flow's completion time.
inline std::vector<double> fluid_ps_finish_times(const std::vector<std::pair<double, double>>& flows,
                                                 double rate_bps) {
    const double byte_rate = rate_bps / 8.0;
    struct F {
        double start;
        double remaining;
        double finish = -1.0;
    };
    std::vector<F> fs;
    fs.reserve(flows.size());
    for (auto [start, size] : flows) fs.push_back({start, size});

    std::vector<double> events;
    for (const auto& f : fs) events.push_back(f.start);
    std::sort(events.begin(), events.end());

    double t = events.empty() ? 0.0 : events.front();
    std::size_t next_arrival = 0;
    while (true) {
        std::vector<std::size_t> active;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            if (fs[i].start <= t + 1e-15 && fs[i].finish < 0.0 && fs[i].remaining > 0.0) {
                active.push_back(i);
            }
        }
        while (next_arrival < events.size() && events[next_arrival] <= t + 1e-15) ++next_arrival;
        if (active.empty()) {
            if (next_arrival >= events.size()) break;
            t = events[next_arrival];
            continue;
        }
        double per_flow = byte_rate / static_cast<double>(active.size());
        double min_remaining = kInf;
        for (std::size_t i : active) min_remaining = std::min(min_remaining, fs[i].remaining);
        double t_complete = t + min_remaining / per_flow;
        double t_next = next_arrival < events.size() ? events[next_arrival] : kInf;
        double t_end = std::min(t_complete, t_next);
        for (std::size_t i : active) fs[i].remaining -= (t_end - t) * per_flow;
        for (std::size_t i : active) {
            if (fs[i].remaining <= 1e-9) {
                fs[i].remaining = 0.0;
                fs[i].finish = t_end;
            }
        }
        t = t_end;
    }
    std::vector<double> out;
    out.reserve(fs.size());
    for (const auto& f : fs) out.push_back(f.finish);
    return out;
}

}  // namespace qcluster::oracle
