#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qcluster/types.hpp"

namespace qcluster {

// One cell of the SCM sketch: last access time, byte (or packet) counter, and
// the queue the last packet hashed here was sent to.
struct SketchBucket {
    double timestamp = 0.0;
    std::uint64_t counter = 0;
    int queue_id = kUnsetQueue;
};

// delta_t_flowlet <= delta_t_message makes "new message" imply "new flowlet";
// larger flowlet windows are accepted but lose that implication.
struct ScmConfig {
    int rows = 3;         // number of hash-indexed arrays (d)
    int cols = 2304;      // buckets per array (l); 3 x 2304 x 12B ~= 83KB
    double delta_t_message = 5e-3;
    double delta_t_flowlet = 500e-6;
    std::uint64_t seed = 0x51c2a9f0d1e5ULL;
};

// Result of one sketch lookup, merged across the d mapped buckets.
struct SketchQueryResult {
    std::uint64_t weight_estimate = 0;  // min counter
    double last_seen = 0.0;             // oldest timestamp
    bool is_new_message = false;
    bool is_new_flowlet = false;
    int prev_queue = kUnsetQueue;
};

// Scheduling Count-Min sketch: d rows of l buckets with lazy time-based aging.
// A bucket older than delta_t_message is treated as free and is re-initialized
// by the next insert; flowlet detection uses the shorter delta_t_flowlet
// window. The counter path and the queue-id path never gate each other (the
// split-register layout used on switch ASICs), so insert leaves queue_id
// alone and update_queue_id leaves the counter alone.
//
// Per-packet call order matters: query and update_queue_id must see the
// timestamps as they were before this packet's insert refreshes them, so the
// caller runs query -> update_queue_id -> insert at a single time `now`.
class ScmSketch {
  public:
    explicit ScmSketch(const ScmConfig& cfg);

    // Adds `amount` to the flow's counters. A message-stale bucket is
    // restarted at `amount` instead. Time must be nondecreasing across calls.
    void insert(FlowId flow, std::uint64_t amount, double now);

    // Merged view across the flow's d buckets. Does not mutate the sketch.
    SketchQueryResult query(FlowId flow, double now, PolicyKind kind) const;

    // Records the queue chosen for this packet. A flowlet-stale bucket takes
    // the new queue directly; a live one only descends in priority
    // (priority-ordered) or is left pinned (fair).
    void update_queue_id(FlowId flow, int chosen_queue, double now, PolicyKind kind);

    // Previous-queue merge rule: highest priority across buckets for
    // priority-ordered policies, the oldest bucket's record for fair ones.
    // kUnsetQueue when no mapped bucket has a record.
    int get_prev_queue(FlowId flow, double now, PolicyKind kind) const;

    std::size_t bucket_index(int row, FlowId flow) const;
    const SketchBucket& bucket(int row, std::size_t col) const {
        return rows_[static_cast<std::size_t>(row)][col];
    }
    const ScmConfig& config() const { return cfg_; }

    // Debug dump, one bucket per line: "row col timestamp counter queue_id".
    void dump(std::ostream& os) const;

  private:
    ScmConfig cfg_;
    std::vector<std::vector<SketchBucket>> rows_;
    std::vector<std::uint64_t> row_seeds_;
    double last_insert_time_ = 0.0;
};

}  // namespace qcluster
