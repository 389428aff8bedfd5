#include "qcluster/qcluster_scheduler.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "qcluster/pda.hpp"

namespace qcluster {

namespace {

ClusterConfig main_engine_config(const QClusterOptions& opt, int deadline_queues) {
    ClusterConfig cfg = opt.cluster;
    cfg.size_strategy = policy_spec(opt.policy).size_strategy;
    cfg.num_queues = opt.cluster.num_queues - deadline_queues;
    if (policy_spec(opt.policy).counts_packets) {
        cfg.initial_weight = 1.0;  // packet-unit weights
    }
    return cfg;
}

ClusterConfig deadline_engine_config(const QClusterOptions& opt, int deadline_queues) {
    ClusterConfig cfg = opt.cluster;
    cfg.size_strategy = SizeStrategy::kProportionalClusterSize;
    cfg.num_queues = deadline_queues;
    cfg.initial_weight = opt.ddl_initial_weight;
    return cfg;
}

int deadline_class_width(const QClusterOptions& opt) {
    if (policy_spec(opt.policy).name != PolicyName::kQcDdl) return 0;
    if (opt.cluster.num_queues < 4) {
        throw std::invalid_argument("QC-DDL needs at least 4 queues");
    }
    int c = opt.deadline_queues > 0 ? opt.deadline_queues
                                    : (opt.cluster.num_queues + 3) / 4;
    c = std::max(2, std::min(c, opt.cluster.num_queues - 2));
    return c;
}

}  // namespace

QClusterScheduler::QClusterScheduler(const QClusterOptions& opt)
    : opt_(opt),
      spec_(policy_spec(opt.policy)),
      sketch_(opt.sketch),
      main_engine_(main_engine_config(opt, deadline_class_width(opt))),
      deadline_queue_count_(deadline_class_width(opt)),
      queues_(opt.cluster.num_queues),
      drr_(opt.cluster.num_queues) {
    if (deadline_queue_count_ > 0) {
        deadline_engine_ =
            std::make_unique<ClusterEngine>(deadline_engine_config(opt, deadline_queue_count_));
    }
}

void QClusterScheduler::bind_flows(const std::vector<FlowSpec>& flows) {
    flows_ = flows;
    if (spec_.needs_flow_sizes) {
        for (const auto& f : flows_) {
            if (f.size == 0) {
                throw std::invalid_argument("remaining-size policy needs declared flow sizes");
            }
        }
    }
}

void QClusterScheduler::maybe_sync(double now) {
    if (!opt_.cluster.dataplane_mode) return;
    double period = opt_.cluster.control_plane_period;
    if (!synced_once_ || now >= main_engine_.frozen_table().epoch + period) {
        main_engine_.control_plane_sync(now);
        if (deadline_engine_) deadline_engine_->control_plane_sync(now);
        // WRR weights are control-plane values too.
        frozen_drr_weights_.assign(static_cast<std::size_t>(opt_.cluster.num_queues), 0.0);
        for (int i = 0; i < opt_.cluster.num_queues; ++i) {
            frozen_drr_weights_[static_cast<std::size_t>(i)] =
                engine_for(i).queue_weight(local_index(i));
        }
        synced_once_ = true;
    }
}

int QClusterScheduler::enqueue(std::size_t pkt, const PacketRecord& rec, double now) {
    maybe_sync(now);

    const FlowSpec& flow = flows_.at(static_cast<std::size_t>(rec.flow_id));
    SketchQueryResult query = sketch_.query(rec.flow_id, now, spec_.pda_kind);

    FlowTruth& truth = truth_[rec.flow_id];
    bool truly_new_flowlet = now - truth.last_arrival > opt_.sketch.delta_t_flowlet;

    if (opt_.audit_queue_safety && spec_.pda_kind == PolicyKind::kPriorityOrdered &&
        !truly_new_flowlet && query.prev_queue != kUnsetQueue &&
        query.prev_queue < truth.last_queue) {
        ++queue_safety_violations_;
    }
    if (query.is_new_flowlet && truth.inflight > 0) {
        ++unsound_flowlet_starts_;  // flowlet test fired while packets were still queued
    }

    // A message older than delta_t_message is scheduled as a fresh unit.
    std::uint64_t sent = query.is_new_message ? 0 : query.weight_estimate;
    PolicyWeight w = policy_weight(spec_, sent, flow.size, flow.start, flow.deadline, now);

    int chosen;
    if (w.deadline_class) {
        chosen = deadline_engine_->choose_queue(w.value);
    } else {
        chosen = deadline_queue_count_ + main_engine_.choose_queue(w.value);
    }

    if (opt_.pda_enabled) {
        if (opt_.pda_exact_tracker) {
            SketchQueryResult exact = query;
            exact.is_new_flowlet = truly_new_flowlet;
            exact.prev_queue = truth.last_queue;
            chosen = pda::constrain(chosen, exact, spec_.pda_kind);
        } else {
            chosen = pda::constrain(chosen, query, spec_.pda_kind);
        }
    }

    // The queue-id record must see pre-insert timestamps; insert then
    // refreshes them.
    sketch_.update_queue_id(rec.flow_id, chosen, now, spec_.pda_kind);
    sketch_.insert(rec.flow_id, sketch_increment(spec_, rec.size, opt_.mtu), now);

    // Cluster statistics follow the queue the packet actually went to, except
    // when disorder avoidance pushed it into the other class (whose weights
    // are in different units).
    if (is_deadline_queue(chosen) == w.deadline_class) {
        engine_for(chosen).assign(w.value, local_index(chosen));
    }
    engine_for(chosen).on_enqueue(local_index(chosen), rec.size);
    queues_.push(chosen, pkt, rec.size);

    truth.last_arrival = now;
    truth.last_queue = chosen;
    truth.inflight += 1;
    return chosen;
}

int QClusterScheduler::pick_queue_for_dequeue(double now) {
    (void)now;
    switch (spec_.dequeue) {
        case DequeueKind::kStrictPriority:
            return queues_.first_nonempty();
        case DequeueKind::kWeightedRoundRobin: {
            // Queue share ~ flows in the queue ~ occupancy / queue weight;
            // with equal cluster sizes this reduces to the inverse queue
            // weight. Empty queues carry no share.
            const int k = queues_.num_queues();
            std::vector<std::uint64_t> heads(static_cast<std::size_t>(k), 0);
            std::vector<double> shares(static_cast<std::size_t>(k), 0.0);
            for (int i = 0; i < k; ++i) {
                if (queues_.empty(i)) continue;
                heads[static_cast<std::size_t>(i)] = record(queues_.front(i)).size;
                double m = opt_.cluster.dataplane_mode && !frozen_drr_weights_.empty()
                               ? frozen_drr_weights_[static_cast<std::size_t>(i)]
                               : engine_for(i).queue_weight(local_index(i));
                shares[static_cast<std::size_t>(i)] =
                    static_cast<double>(queues_.packets(i)) / std::max(m, 1e-12);
            }
            return drr_.next_by_share(heads, shares, opt_.mtu);
        }
        case DequeueKind::kHybridDeadlineFirst: {
            if (opt_.ddl_edf) {
                int best = -1;
                double best_deadline = kInf;
                for (int i = 0; i < deadline_queue_count_; ++i) {
                    if (queues_.empty(i)) continue;
                    const PacketRecord& head = record(queues_.front(i));
                    double d = flows_.at(static_cast<std::size_t>(head.flow_id)).start +
                               head.deadline;
                    if (d < best_deadline) {
                        best_deadline = d;
                        best = i;
                    }
                }
                if (best >= 0) return best;
            } else {
                for (int i = 0; i < deadline_queue_count_; ++i) {
                    if (!queues_.empty(i)) return i;
                }
            }
            for (int i = deadline_queue_count_; i < queues_.num_queues(); ++i) {
                if (!queues_.empty(i)) return i;
            }
            return -1;
        }
    }
    return -1;
}

bool QClusterScheduler::dequeue(std::size_t& pkt_out, double now) {
    int q = pick_queue_for_dequeue(now);
    if (q < 0) return false;
    std::uint32_t bytes = record(queues_.front(q)).size;
    pkt_out = queues_.pop(q, bytes);
    engine_for(q).on_dequeue(local_index(q), bytes);
    if (spec_.dequeue == DequeueKind::kWeightedRoundRobin) drr_.on_served(q, bytes);
    return true;
}

void QClusterScheduler::on_departure(std::size_t pkt, const PacketRecord& rec, double now) {
    (void)pkt;
    (void)now;
    auto it = truth_.find(rec.flow_id);
    assert(it != truth_.end() && it->second.inflight > 0);
    it->second.inflight -= 1;
}

void QClusterScheduler::control_tick(double now) {
    main_engine_.control_tick();
    if (deadline_engine_) deadline_engine_->control_tick();
    threshold_log_.push_back({now, main_engine_.config().dataplane_mode && synced_once_
                                       ? main_engine_.frozen_table().thresholds
                                       : main_engine_.current_thresholds()});
}

std::unique_ptr<QClusterScheduler> make_qcluster(const QClusterOptions& opt) {
    return std::make_unique<QClusterScheduler>(opt);
}

}  // namespace qcluster
