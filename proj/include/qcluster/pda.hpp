#pragma once

#include <algorithm>

#include "qcluster/sketch.hpp"
#include "qcluster/types.hpp"

namespace qcluster {
namespace pda {

// Packet-disorder avoidance: the first packet of a flowlet may go anywhere;
// inside a flowlet, priority-ordered policies may not move above the previous
// packet's queue and fair policies may not change queue at all.
inline int constrain(int choice, const SketchQueryResult& query, PolicyKind kind) {
    if (query.is_new_flowlet || query.prev_queue == kUnsetQueue) return choice;
    if (kind == PolicyKind::kPriorityOrdered) return std::max(choice, query.prev_queue);
    return query.prev_queue;
}

}  // namespace pda
}  // namespace qcluster
