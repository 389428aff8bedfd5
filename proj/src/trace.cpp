#include "qcluster/trace.hpp"

#include <cstdio>
#include <ostream>

namespace qcluster {

namespace {
// One fixed float format keeps reruns byte-identical.
void put(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    os << buf;
}
}  // namespace

void write_packet_csv(const TraceLog& log, std::ostream& os) {
    os << "flow_id,seq,size,arrival,queue,departure,ecn_marked\n";
    for (const auto& p : log.packets) {
        os << p.flow_id << ',' << p.seq << ',' << p.size << ',';
        put(os, p.arrival);
        os << ',' << p.queue << ',';
        if (p.dropped) {
            os << "DROP";
        } else {
            put(os, p.departure);
        }
        os << ',' << (p.ecn_marked ? 1 : 0) << '\n';
    }
}

void write_flow_csv(const TraceLog& log, std::ostream& os) {
    os << "flow_id,size,start,fct,deadline,met,disorder_count\n";
    for (const auto& f : log.flows) {
        os << f.id << ',' << f.size << ',';
        put(os, f.start);
        os << ',';
        if (f.complete()) {
            put(os, f.fct());
        } else {
            os << "INCOMPLETE";
        }
        os << ',';
        if (f.deadline != kNoDeadline) {
            put(os, f.deadline);
            os << ',' << (f.deadline_met() ? 1 : 0);
        } else {
            os << ",";
        }
        os << ',' << f.disorder_count << '\n';
    }
}

void write_threshold_csv(const TraceLog& log, std::ostream& os) {
    os << "epoch";
    if (!log.threshold_log.empty()) {
        for (std::size_t i = 1; i <= log.threshold_log.front().thresholds.size(); ++i) {
            os << ",thres_" << i;
        }
    }
    os << '\n';
    for (const auto& snap : log.threshold_log) {
        put(os, snap.epoch);
        for (double t : snap.thresholds) {
            os << ',';
            put(os, t);
        }
        os << '\n';
    }
}

void write_metrics_csv(const std::map<std::string, double>& metrics, std::ostream& os) {
    os << "metric,value\n";
    for (const auto& [key, value] : metrics) {
        os << key << ',';
        put(os, value);
        os << '\n';
    }
}

}  // namespace qcluster
