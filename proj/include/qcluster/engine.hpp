#pragma once

#include <cstdint>
#include <vector>

#include "qcluster/types.hpp"

namespace qcluster {

// Per-queue cluster statistics. The centroid (queue weight) is
// weight_sum / packet_count; both fields decay together so the centroid keeps
// its value but loses inertia. Occupancy mirrors the physical queue exactly.
struct QueueState {
    double weight_sum = 0.0;
    double packet_count = 0.0;
    std::uint32_t occupancy_packets = 0;
    std::uint64_t occupancy_bytes = 0;
};

enum class SizeStrategy { kSameClusterSize, kProportionalClusterSize };
enum class ThresholdRule { kAdaptive, kArithmeticMean, kGeometricMean, kHarmonicMean };

struct ClusterConfig {
    int num_queues = 8;  // k >= 2
    SizeStrategy size_strategy = SizeStrategy::kProportionalClusterSize;
    ThresholdRule threshold_rule = ThresholdRule::kAdaptive;
    double alpha = 1.0;
    double alpha_step = 0.05;
    double alpha_min = 0.125;
    double alpha_max = 8.0;
    // Occupancy max/min ratio beyond which alpha adapts.
    double imbalance_tolerance = 1.25;
    bool dataplane_mode = false;
    double control_plane_period = 0.0;  // seconds between threshold refreshes
    // Empty queues report a centroid of initial_weight * 2^i.
    double initial_weight = 1500.0;
    double decay = 0.5;               // weight-sum aging per control interval
    double control_interval = 100e-6; // alpha adaptation / decay cadence
    // p_i measure: current occupancy (default) or a decayed assignment count.
    bool use_decayed_size = false;
};

// k-1 boundaries frozen by a control-plane refresh; between refreshes the
// per-packet path only compares against them (no division).
struct ThresholdTable {
    std::vector<double> thresholds;
    double epoch = 0.0;
};

// thres = m_i*beta + m_{i+1}*(1-beta) with beta = (p_i/(p_i+p_{i+1}))^alpha for
// the adaptive rule; plain two-point means otherwise. p_i + p_{i+1} == 0 falls
// back to beta = 1/2. Callers pass p_i/m_i in place of p_i for
// proportional-cluster-size (adaptive rule only).
double compute_threshold(double m_i, double m_ip1, double p_i, double p_ip1, ThresholdRule rule,
                         double alpha);

// The cluster engine for one port (or one special-property class of a port):
// maintains the k centroids, picks the queue whose weight interval contains a
// packet's weight, and runs the closed-loop alpha/threshold control.
class ClusterEngine {
  public:
    explicit ClusterEngine(const ClusterConfig& cfg);

    // Centroid of queue i; the configured ladder value when the queue has
    // never been assigned to (or has fully decayed away).
    double queue_weight(int i) const;

    // Index i with thres_{i-1} <= w < thres_i (thres_0 = -inf, thres_k = +inf).
    // Live mode recomputes thresholds from current state; dataplane mode uses
    // the frozen table from the last control_plane_sync.
    int choose_queue(double packet_weight) const;

    // Adds the packet's weight to the chosen cluster and restores centroid
    // order by clamping the updated centroid to its neighbors' values.
    void assign(double packet_weight, int chosen);

    // One control-interval step: decays cluster mass and nudges alpha toward
    // balanced cluster sizes (same-cluster-size) or balanced packets-per-weight
    // (proportional-cluster-size).
    void control_tick();

    // Recomputes queue weights and freezes the threshold table (the only place
    // division happens in dataplane mode).
    const ThresholdTable& control_plane_sync(double now);

    double alpha() const { return cfg_.alpha; }
    const ClusterConfig& config() const { return cfg_; }
    int num_queues() const { return cfg_.num_queues; }
    const QueueState& state(int i) const { return states_[static_cast<std::size_t>(i)]; }
    const ThresholdTable& frozen_table() const { return table_; }

    std::vector<double> current_thresholds() const;

    void on_enqueue(int queue, std::uint64_t bytes);
    void on_dequeue(int queue, std::uint64_t bytes);

  private:
    double size_measure(int i) const;
    double threshold_between(int i) const;  // between queue i and i+1

    ClusterConfig cfg_;
    std::vector<QueueState> states_;
    std::vector<double> decayed_assign_;  // alternative p_i measure
    ThresholdTable table_;
    bool synced_ = false;
};

}  // namespace qcluster
