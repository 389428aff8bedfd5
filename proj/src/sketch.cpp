#include "qcluster/sketch.hpp"

#include <cassert>
#include <ostream>
#include <stdexcept>

#include "qcluster/hash.hpp"

namespace qcluster {

ScmSketch::ScmSketch(const ScmConfig& cfg) : cfg_(cfg) {
    if (cfg.rows < 1 || cfg.cols < 1) {
        throw std::invalid_argument("sketch geometry must be at least 1x1");
    }
    rows_.assign(static_cast<std::size_t>(cfg.rows),
                 std::vector<SketchBucket>(static_cast<std::size_t>(cfg.cols)));
    row_seeds_.resize(static_cast<std::size_t>(cfg.rows));
    std::uint64_t s = cfg.seed;
    for (auto& seed : row_seeds_) {
        s = mix64(s);
        seed = s;
    }
}

std::size_t ScmSketch::bucket_index(int row, FlowId flow) const {
    return hash_key(flow, row_seeds_[static_cast<std::size_t>(row)]) %
           static_cast<std::uint64_t>(cfg_.cols);
}

void ScmSketch::insert(FlowId flow, std::uint64_t amount, double now) {
    assert(now >= last_insert_time_ && "sketch clock must be monotone");
    last_insert_time_ = now;
    for (int r = 0; r < cfg_.rows; ++r) {
        SketchBucket& b = rows_[static_cast<std::size_t>(r)][bucket_index(r, flow)];
        if (b.timestamp < now - cfg_.delta_t_message) {
            b.counter = amount;  // first packet of a new message
        } else {
            b.counter += amount;
        }
        b.timestamp = now;
    }
}

SketchQueryResult ScmSketch::query(FlowId flow, double now, PolicyKind kind) const {
    SketchQueryResult res;
    bool first = true;
    for (int r = 0; r < cfg_.rows; ++r) {
        const SketchBucket& b = rows_[static_cast<std::size_t>(r)][bucket_index(r, flow)];
        if (first) {
            res.weight_estimate = b.counter;
            res.last_seen = b.timestamp;
            first = false;
        } else {
            if (b.counter < res.weight_estimate) res.weight_estimate = b.counter;
            if (b.timestamp < res.last_seen) res.last_seen = b.timestamp;
        }
    }
    res.is_new_message = res.last_seen < now - cfg_.delta_t_message;
    res.is_new_flowlet = res.last_seen < now - cfg_.delta_t_flowlet;
    res.prev_queue = get_prev_queue(flow, now, kind);
    return res;
}

void ScmSketch::update_queue_id(FlowId flow, int chosen_queue, double now, PolicyKind kind) {
    assert(chosen_queue >= 0);
    for (int r = 0; r < cfg_.rows; ++r) {
        SketchBucket& b = rows_[static_cast<std::size_t>(r)][bucket_index(r, flow)];
        if (b.timestamp < now - cfg_.delta_t_flowlet) {
            b.queue_id = chosen_queue;  // stale record, take the new queue directly
        } else if (kind == PolicyKind::kPriorityOrdered) {
            // Priority may only descend while the record is live; a colliding
            // flow can therefore never be pointed at a higher-priority queue.
            if (b.queue_id == kUnsetQueue || chosen_queue > b.queue_id) {
                b.queue_id = chosen_queue;
            }
        } else {
            // Fair policies pin the queue at the flowlet start and the caller
            // keeps passing that pin, so rewriting it is idempotent for the
            // owner and repairs buckets a colliding flow has claimed.
            b.queue_id = chosen_queue;
        }
    }
}

int ScmSketch::get_prev_queue(FlowId flow, double now, PolicyKind kind) const {
    (void)now;
    int best = kUnsetQueue;
    double best_ts = 0.0;
    for (int r = 0; r < cfg_.rows; ++r) {
        const SketchBucket& b = rows_[static_cast<std::size_t>(r)][bucket_index(r, flow)];
        if (b.queue_id == kUnsetQueue) continue;
        if (kind == PolicyKind::kPriorityOrdered) {
            if (best == kUnsetQueue || b.queue_id < best) best = b.queue_id;
        } else {
            // Fair: the least recently touched record is the least likely to
            // have been refreshed by a colliding flow.
            if (best == kUnsetQueue || b.timestamp < best_ts) {
                best = b.queue_id;
                best_ts = b.timestamp;
            }
        }
    }
    return best;
}

void ScmSketch::dump(std::ostream& os) const {
    for (int r = 0; r < cfg_.rows; ++r) {
        for (int c = 0; c < cfg_.cols; ++c) {
            const SketchBucket& b = rows_[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            os << r << ' ' << c << ' ' << b.timestamp << ' ' << b.counter << ' ' << b.queue_id
               << '\n';
        }
    }
}

}  // namespace qcluster
