#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "qcluster/packet.hpp"

namespace qcluster {

// packet rows: flow_id,seq,size,arrival,queue,departure|DROP,ecn_marked
void write_packet_csv(const TraceLog& log, std::ostream& os);

// flow rows: flow_id,size,start,fct,deadline,met,disorder_count
void write_flow_csv(const TraceLog& log, std::ostream& os);

// threshold rows: epoch,thres_1,...,thres_{k-1}
void write_threshold_csv(const TraceLog& log, std::ostream& os);

// metric,value rows, sorted by key
void write_metrics_csv(const std::map<std::string, double>& metrics, std::ostream& os);

}  // namespace qcluster
