#include "qcluster/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace qcluster {

double compute_threshold(double m_i, double m_ip1, double p_i, double p_ip1, ThresholdRule rule,
                         double alpha) {
    assert(m_i <= m_ip1);
    switch (rule) {
        case ThresholdRule::kAdaptive: {
            double total = p_i + p_ip1;
            double beta = total > 0.0 ? std::pow(p_i / total, alpha) : 0.5;
            return m_i * beta + m_ip1 * (1.0 - beta);
        }
        case ThresholdRule::kArithmeticMean:
            return 0.5 * (m_i + m_ip1);
        case ThresholdRule::kGeometricMean:
            return std::sqrt(m_i * m_ip1);
        case ThresholdRule::kHarmonicMean: {
            double sum = m_i + m_ip1;
            return sum > 0.0 ? 2.0 * m_i * m_ip1 / sum : m_i;
        }
    }
    return 0.5 * (m_i + m_ip1);
}

ClusterEngine::ClusterEngine(const ClusterConfig& cfg) : cfg_(cfg) {
    if (cfg.num_queues < 2) throw std::invalid_argument("need at least 2 queues");
    if (cfg.alpha < cfg.alpha_min || cfg.alpha > cfg.alpha_max) {
        throw std::invalid_argument("alpha outside [alpha_min, alpha_max]");
    }
    states_.assign(static_cast<std::size_t>(cfg.num_queues), QueueState{});
    decayed_assign_.assign(static_cast<std::size_t>(cfg.num_queues), 0.0);
}

double ClusterEngine::queue_weight(int i) const {
    const QueueState& q = states_[static_cast<std::size_t>(i)];
    if (q.packet_count <= 0.0) {
        return cfg_.initial_weight * std::ldexp(1.0, i);  // w0 * 2^i ladder
    }
    return q.weight_sum / q.packet_count;
}

double ClusterEngine::size_measure(int i) const {
    double p = cfg_.use_decayed_size ? decayed_assign_[static_cast<std::size_t>(i)]
                                     : static_cast<double>(states_[static_cast<std::size_t>(i)]
                                                               .occupancy_packets);
    if (cfg_.size_strategy == SizeStrategy::kProportionalClusterSize &&
        cfg_.threshold_rule == ThresholdRule::kAdaptive) {
        double m = queue_weight(i);
        return p / std::max(m, 1e-12);  // packets per weight
    }
    return p;
}

double ClusterEngine::threshold_between(int i) const {
    return compute_threshold(queue_weight(i), queue_weight(i + 1), size_measure(i),
                             size_measure(i + 1), cfg_.threshold_rule, cfg_.alpha);
}

std::vector<double> ClusterEngine::current_thresholds() const {
    std::vector<double> t(static_cast<std::size_t>(cfg_.num_queues - 1));
    for (int i = 0; i + 1 < cfg_.num_queues; ++i) {
        t[static_cast<std::size_t>(i)] = threshold_between(i);
    }
    return t;
}

int ClusterEngine::choose_queue(double packet_weight) const {
    if (cfg_.dataplane_mode) {
        assert(synced_ && "dataplane mode needs a control_plane_sync first");
        const auto& t = table_.thresholds;
        // Range lookup: the queue is the number of boundaries <= w
        // (weight equal to a boundary goes to the higher queue).
        return static_cast<int>(std::upper_bound(t.begin(), t.end(), packet_weight) - t.begin());
    }
    int q = 0;
    for (int i = 0; i + 1 < cfg_.num_queues; ++i) {
        if (packet_weight >= threshold_between(i)) {
            q = i + 1;
        } else {
            break;
        }
    }
    return q;
}

void ClusterEngine::assign(double packet_weight, int chosen) {
    assert(chosen >= 0 && chosen < cfg_.num_queues);
    QueueState& q = states_[static_cast<std::size_t>(chosen)];
    q.weight_sum += packet_weight;
    q.packet_count += 1.0;
    decayed_assign_[static_cast<std::size_t>(chosen)] += 1.0;

    // Keep centroids nondecreasing in the queue index: clamp the moved
    // centroid between its neighbors instead of relabeling queues.
    double m = q.weight_sum / q.packet_count;
    double lo = chosen > 0 ? queue_weight(chosen - 1) : -kInf;
    double hi = chosen + 1 < cfg_.num_queues ? queue_weight(chosen + 1) : kInf;
    double clamped = std::min(std::max(m, lo), hi);
    if (clamped != m) {
        q.weight_sum = clamped * q.packet_count;
    }
}

void ClusterEngine::control_tick() {
    for (std::size_t i = 0; i < states_.size(); ++i) {
        states_[i].weight_sum *= cfg_.decay;
        states_[i].packet_count *= cfg_.decay;
        decayed_assign_[i] *= cfg_.decay;
    }

    // Alpha feedback: compare the occupancy mass center against the middle
    // queue. Raising alpha lowers beta and widens every low-index interval,
    // pulling packets toward high-priority queues; lowering it does the
    // opposite. Only react to a real imbalance.
    double total = 0.0, weighted = 0.0, pmin = kInf, pmax = 0.0;
    for (int i = 0; i < cfg_.num_queues; ++i) {
        double p = size_measure(i);
        total += p;
        weighted += p * static_cast<double>(i);
        pmin = std::min(pmin, p);
        pmax = std::max(pmax, p);
    }
    if (total <= 0.0) return;
    bool imbalanced = pmin <= 0.0 ? pmax > 0.0 : (pmax / pmin) > cfg_.imbalance_tolerance;
    if (!imbalanced) return;
    double center = weighted / total;
    double target = 0.5 * static_cast<double>(cfg_.num_queues - 1);
    if (center > target) {
        cfg_.alpha = std::min(cfg_.alpha + cfg_.alpha_step, cfg_.alpha_max);
    } else if (center < target) {
        cfg_.alpha = std::max(cfg_.alpha - cfg_.alpha_step, cfg_.alpha_min);
    }
}

const ThresholdTable& ClusterEngine::control_plane_sync(double now) {
    table_.thresholds = current_thresholds();
    table_.epoch = now;
    synced_ = true;
    return table_;
}

void ClusterEngine::on_enqueue(int queue, std::uint64_t bytes) {
    QueueState& q = states_[static_cast<std::size_t>(queue)];
    q.occupancy_packets += 1;
    q.occupancy_bytes += bytes;
}

void ClusterEngine::on_dequeue(int queue, std::uint64_t bytes) {
    QueueState& q = states_[static_cast<std::size_t>(queue)];
    assert(q.occupancy_packets > 0 && q.occupancy_bytes >= bytes);
    q.occupancy_packets -= 1;
    q.occupancy_bytes -= bytes;
}

}  // namespace qcluster
