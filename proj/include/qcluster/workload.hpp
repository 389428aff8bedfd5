#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qcluster/packet.hpp"
#include "qcluster/rng.hpp"

namespace qcluster {

// Empirical flow-size distribution as (size_bytes, cumulative_probability)
// breakpoints; sampling interpolates between them (linearly in size, or in
// log-size when log_interpolation is set).
class SizeCdf {
  public:
    SizeCdf(std::string name, std::vector<std::pair<std::uint64_t, double>> points,
            bool log_interpolation = false);

    // File format: one "size_bytes<TAB>cum_prob" pair per line, '#' comments.
    static SizeCdf from_file(const std::string& path, bool log_interpolation = false);
    void save(std::ostream& os) const;

    std::uint64_t sample(Rng& rng) const;
    std::uint64_t sample_at(double u) const;  // u in [0,1)
    double mean() const;                      // of the interpolated distribution
    std::uint64_t min_size() const { return points_.front().first; }
    std::uint64_t max_size() const { return points_.back().first; }
    const std::string& name() const { return name_; }

  private:
    std::string name_;
    std::vector<std::pair<std::uint64_t, double>> points_;
    bool log_interp_;
};

// Poisson flow arrivals hitting a byte-load target:
// lambda = load * line_rate / (8 * mean_flow_size).
double arrival_rate(double load, double mean_flow_size, double line_rate);

// num_flows flow starts with exponential inter-arrival gaps and sizes drawn
// from the CDF. Flow ids are dense 0..n-1 in start order.
std::vector<FlowSpec> generate_flows(const SizeCdf& cdf, double load, double line_rate,
                                     std::size_t num_flows, Rng& rng);

struct DeadlineParams {
    std::uint64_t cutoff_bytes = 100'000;  // only smaller flows get deadlines
    double slack_mean_factor = 2.0;        // exponential slack mean, in unloaded FCTs
    double line_rate = 10e9;
};

// deadline = unloaded_fct + Exp(slack_mean_factor * unloaded_fct) for flows
// under the cutoff; larger flows stay deadline-free.
void assign_deadlines(std::vector<FlowSpec>& flows, const DeadlineParams& params, Rng& rng);

// Flow schedules round-trip through CSV for replay.
void save_schedule(const std::vector<FlowSpec>& flows, std::ostream& os);
std::vector<FlowSpec> load_schedule(std::istream& is);

}  // namespace qcluster
