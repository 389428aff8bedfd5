#include "qcluster/policy.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace qcluster {

PolicySpec policy_spec(PolicyName name) {
    switch (name) {
        case PolicyName::kQcSrpt:
            return {name, PolicyKind::kPriorityOrdered, SizeStrategy::kProportionalClusterSize,
                    DequeueKind::kStrictPriority, false, true, false};
        case PolicyName::kQcLas:
            return {name, PolicyKind::kPriorityOrdered, SizeStrategy::kProportionalClusterSize,
                    DequeueKind::kStrictPriority, false, false, false};
        case PolicyName::kQcFq:
            return {name, PolicyKind::kFair, SizeStrategy::kSameClusterSize,
                    DequeueKind::kWeightedRoundRobin, true, false, false};
        case PolicyName::kQcDdl:
            return {name, PolicyKind::kPriorityOrdered, SizeStrategy::kProportionalClusterSize,
                    DequeueKind::kHybridDeadlineFirst, false, true, true};
    }
    throw std::invalid_argument("unknown policy");
}

PolicyName parse_policy_name(const std::string& s) {
    if (s == "QC-SRPT") return PolicyName::kQcSrpt;
    if (s == "QC-LAS") return PolicyName::kQcLas;
    if (s == "QC-FQ") return PolicyName::kQcFq;
    if (s == "QC-DDL") return PolicyName::kQcDdl;
    throw std::invalid_argument("unknown policy name: " + s);
}

std::string policy_name_string(PolicyName name) {
    switch (name) {
        case PolicyName::kQcSrpt: return "QC-SRPT";
        case PolicyName::kQcLas: return "QC-LAS";
        case PolicyName::kQcFq: return "QC-FQ";
        case PolicyName::kQcDdl: return "QC-DDL";
    }
    return "?";
}

std::uint64_t sketch_increment(const PolicySpec& spec, std::uint32_t packet_bytes,
                               std::uint32_t mtu) {
    if (!spec.counts_packets) return packet_bytes;
    return std::max<std::uint64_t>(1, (packet_bytes + mtu - 1) / mtu);
}

PolicyWeight policy_weight(const PolicySpec& spec, std::uint64_t sent_estimate,
                           std::uint64_t declared_size, double flow_start, double deadline,
                           double now) {
    PolicyWeight w;
    switch (spec.name) {
        case PolicyName::kQcLas:
        case PolicyName::kQcFq:
            w.value = static_cast<double>(sent_estimate);
            return w;
        case PolicyName::kQcSrpt:
            w.value = sent_estimate >= declared_size
                          ? 0.0
                          : static_cast<double>(declared_size - sent_estimate);
            return w;
        case PolicyName::kQcDdl:
            if (deadline != kNoDeadline && flow_start + deadline > now) {
                w.deadline_class = true;
                w.value = flow_start + deadline - now;
            } else {
                // Non-deadline flows, and deadline flows already past due
                // (serving those ahead of meetable ones only adds misses),
                // compete by remaining size.
                w.value = sent_estimate >= declared_size
                              ? 0.0
                              : static_cast<double>(declared_size - sent_estimate);
            }
            return w;
    }
    return w;
}

int DrrState::next(const std::vector<std::uint64_t>& head_bytes,
                   const std::vector<double>& weights, std::uint32_t mtu) {
    std::vector<double> shares(weights.size(), 0.0);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        shares[i] = 1.0 / std::max(weights[i], 1e-12);
    }
    return next_by_share(head_bytes, shares, mtu);
}

int DrrState::next_by_share(const std::vector<std::uint64_t>& head_bytes,
                            const std::vector<double>& shares, std::uint32_t mtu) {
    const int k = static_cast<int>(deficit_.size());
    double min_share = kInf;
    bool any = false;
    for (int i = 0; i < k; ++i) {
        if (head_bytes[static_cast<std::size_t>(i)] > 0) {
            any = true;
            double s = shares[static_cast<std::size_t>(i)];
            if (s > 0.0) min_share = std::min(min_share, s);
        }
    }
    if (!any) return -1;
    if (min_share == kInf) min_share = 1.0;

    // Classic DRR: each turn credits the queue's quantum once; the server
    // stays on a queue while its deficit covers the head packet, an empty
    // queue forfeits its deficit. Quanta are >= one MTU, so sub-MTU packets
    // are served within a single round; oversized heads take extra rounds.
    const int max_visits = 64 * k + 1;
    for (int visits = 0; visits < max_visits; ++visits) {
        int i = cursor_;
        std::uint64_t head = head_bytes[static_cast<std::size_t>(i)];
        if (head == 0) {
            deficit_[static_cast<std::size_t>(i)] = 0.0;
            turn_credited_ = false;
            cursor_ = (cursor_ + 1) % k;
            continue;
        }
        if (!turn_credited_) {
            double share = std::max(shares[static_cast<std::size_t>(i)], min_share * 1e-6);
            deficit_[static_cast<std::size_t>(i)] +=
                static_cast<double>(mtu) * (share / min_share);
            turn_credited_ = true;
        }
        if (deficit_[static_cast<std::size_t>(i)] >= static_cast<double>(head)) {
            return i;  // caller reports the service via on_served
        }
        turn_credited_ = false;
        cursor_ = (cursor_ + 1) % k;
    }
    for (int i = 0; i < k; ++i) {
        if (head_bytes[static_cast<std::size_t>(i)] > 0) return i;
    }
    return -1;
}

}  // namespace qcluster
