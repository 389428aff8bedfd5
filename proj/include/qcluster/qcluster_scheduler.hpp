#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "qcluster/engine.hpp"
#include "qcluster/policy.hpp"
#include "qcluster/scheduler.hpp"
#include "qcluster/sketch.hpp"

namespace qcluster {

struct QClusterOptions {
    PolicyName policy = PolicyName::kQcLas;
    ScmConfig sketch;
    ClusterConfig cluster;
    bool pda_enabled = true;
    std::uint32_t mtu = 1500;
    // Deadline class width for QC-DDL (top ceil(k/4) queues, at least 2; 0
    // keeps the default). QC-DDL needs num_queues >= 4.
    int deadline_queues = 0;
    bool ddl_edf = false;  // earliest-deadline heads inside the deadline class
    double ddl_initial_weight = 1e-4;  // centroid ladder base for the deadline class (seconds)
    // Oracle/test hooks: exact per-flow state instead of the sketch for PDA,
    // and an audit of sketch previous-queue reports against ground truth.
    bool pda_exact_tracker = false;
    bool audit_queue_safety = false;
};

// The clustering scheduler: sketch-estimated packet weights, centroid-based
// queue choice, disorder avoidance, and the policy's dequeue discipline.
class QClusterScheduler : public Scheduler {
  public:
    QClusterScheduler(const QClusterOptions& opt);

    void bind_flows(const std::vector<FlowSpec>& flows) override;
    int enqueue(std::size_t pkt, const PacketRecord& rec, double now) override;
    bool dequeue(std::size_t& pkt_out, double now) override;
    bool empty() const override { return queues_.all_empty(); }
    void control_tick(double now) override;
    double control_interval() const override { return opt_.cluster.control_interval; }
    void on_departure(std::size_t pkt, const PacketRecord& rec, double now) override;

    const std::vector<ThresholdSnapshot>* threshold_log() const override { return &threshold_log_; }
    std::uint64_t unsound_flowlet_starts() const override { return unsound_flowlet_starts_; }

    std::uint64_t queue_safety_violations() const { return queue_safety_violations_; }
    const ScmSketch& sketch() const { return sketch_; }
    const ClusterEngine& main_engine() const { return main_engine_; }
    const PolicySpec& spec() const { return spec_; }

  private:
    struct FlowTruth {
        double last_arrival = -kInf;
        int last_queue = kUnsetQueue;
        std::uint32_t inflight = 0;
    };

    bool is_deadline_queue(int global) const { return global < deadline_queue_count_; }
    ClusterEngine& engine_for(int global) {
        return is_deadline_queue(global) ? *deadline_engine_ : main_engine_;
    }
    int local_index(int global) const {
        return is_deadline_queue(global) ? global : global - deadline_queue_count_;
    }
    void maybe_sync(double now);
    int pick_queue_for_dequeue(double now);

    QClusterOptions opt_;
    PolicySpec spec_;
    ScmSketch sketch_;
    ClusterEngine main_engine_;
    std::unique_ptr<ClusterEngine> deadline_engine_;  // QC-DDL only
    int deadline_queue_count_ = 0;
    MultiQueue queues_;
    DrrState drr_;
    std::vector<FlowSpec> flows_;
    std::unordered_map<FlowId, FlowTruth> truth_;
    std::vector<ThresholdSnapshot> threshold_log_;
    std::vector<double> frozen_drr_weights_;
    bool synced_once_ = false;
    std::uint64_t unsound_flowlet_starts_ = 0;
    std::uint64_t queue_safety_violations_ = 0;
};

std::unique_ptr<QClusterScheduler> make_qcluster(const QClusterOptions& opt);

}  // namespace qcluster
