#pragma once

#include <cstdint>
#include <limits>

namespace qcluster {

// Simulated time is in seconds, rates in bits/s, sizes in bytes.
using FlowId = std::uint64_t;

// Queue indices are priority-ordered: index 0 is the highest priority.
inline constexpr int kUnsetQueue = -1;

inline constexpr double kNoDeadline = -1.0;

inline double serialization_time(std::uint64_t bytes, double rate_bps) {
    return static_cast<double>(bytes) * 8.0 / rate_bps;
}

// Policy families differ in how the previous-queue record may move:
// priority-ordered queues may only descend within a flowlet, fair queues are pinned.
enum class PolicyKind { kPriorityOrdered, kFair };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace qcluster
