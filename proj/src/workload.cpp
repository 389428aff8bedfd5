#include "qcluster/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qcluster {

SizeCdf::SizeCdf(std::string name, std::vector<std::pair<std::uint64_t, double>> points,
                 bool log_interpolation)
    : name_(std::move(name)), points_(std::move(points)), log_interp_(log_interpolation) {
    if (points_.empty()) throw std::invalid_argument("empty CDF");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].first == 0 || points_[i].second <= 0.0) {
            throw std::invalid_argument("CDF needs positive sizes and probabilities");
        }
        if (i > 0 && (points_[i].first <= points_[i - 1].first ||
                      points_[i].second <= points_[i - 1].second)) {
            throw std::invalid_argument("CDF breakpoints must strictly increase");
        }
    }
    if (std::abs(points_.back().second - 1.0) > 1e-9) {
        throw std::invalid_argument("CDF must end at probability 1.0");
    }
    points_.back().second = 1.0;
}

SizeCdf SizeCdf::from_file(const std::string& path, bool log_interpolation) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CDF file: " + path);
    std::vector<std::pair<std::uint64_t, double>> pts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::uint64_t size;
        double prob;
        if (!(ls >> size)) continue;  // blank/comment line
        if (!(ls >> prob)) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected size prob");
        }
        pts.emplace_back(size, prob);
    }
    auto base = path.find_last_of('/');
    return SizeCdf(base == std::string::npos ? path : path.substr(base + 1), std::move(pts),
                   log_interpolation);
}

void SizeCdf::save(std::ostream& os) const {
    os << "# size_bytes\tcum_prob\n";
    for (const auto& [size, prob] : points_) {
        os << size << '\t' << prob << '\n';
    }
}

std::uint64_t SizeCdf::sample_at(double u) const {
    if (u <= points_.front().second) return points_.front().first;
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (u <= points_[i].second) {
            double p0 = points_[i - 1].second, p1 = points_[i].second;
            double s0 = static_cast<double>(points_[i - 1].first);
            double s1 = static_cast<double>(points_[i].first);
            double t = (u - p0) / (p1 - p0);
            double s = log_interp_ ? s0 * std::pow(s1 / s0, t) : s0 + t * (s1 - s0);
            return static_cast<std::uint64_t>(std::llround(s));
        }
    }
    return points_.back().first;
}

std::uint64_t SizeCdf::sample(Rng& rng) const { return sample_at(rng.uniform()); }

double SizeCdf::mean() const {
    double s0 = static_cast<double>(points_.front().first);
    double mean = points_.front().second * s0;  // atom at the first breakpoint
    for (std::size_t i = 1; i < points_.size(); ++i) {
        double dp = points_[i].second - points_[i - 1].second;
        double a = static_cast<double>(points_[i - 1].first);
        double b = static_cast<double>(points_[i].first);
        // Segment average: arithmetic for linear interpolation, logarithmic
        // mean for log interpolation.
        double seg = log_interp_ ? (b - a) / std::log(b / a) : 0.5 * (a + b);
        mean += dp * seg;
    }
    return mean;
}

double arrival_rate(double load, double mean_flow_size, double line_rate) {
    if (load <= 0.0 || load >= 1.0) throw std::invalid_argument("load must be in (0,1)");
    return load * line_rate / (8.0 * mean_flow_size);
}

std::vector<FlowSpec> generate_flows(const SizeCdf& cdf, double load, double line_rate,
                                     std::size_t num_flows, Rng& rng) {
    double lambda = arrival_rate(load, cdf.mean(), line_rate);
    std::vector<FlowSpec> flows;
    flows.reserve(num_flows);
    double t = 0.0;
    for (std::size_t i = 0; i < num_flows; ++i) {
        t += rng.exponential(1.0 / lambda);
        FlowSpec f;
        f.id = i;
        f.start = t;
        f.size = cdf.sample(rng);
        flows.push_back(f);
    }
    return flows;
}

void assign_deadlines(std::vector<FlowSpec>& flows, const DeadlineParams& params, Rng& rng) {
    for (auto& f : flows) {
        if (f.size >= params.cutoff_bytes) {
            f.deadline = kNoDeadline;
            continue;
        }
        double base = serialization_time(f.size, params.line_rate);
        f.deadline = base + rng.exponential(params.slack_mean_factor * base);
    }
}

void save_schedule(const std::vector<FlowSpec>& flows, std::ostream& os) {
    os << "flow_id,start,size,deadline\n";
    os.precision(17);
    for (const auto& f : flows) {
        os << f.id << ',' << f.start << ',' << f.size << ',';
        if (f.deadline != kNoDeadline) os << f.deadline;
        os << '\n';
    }
}

std::vector<FlowSpec> load_schedule(std::istream& is) {
    std::vector<FlowSpec> flows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line.rfind("flow_id", 0) == 0) continue;
        std::istringstream ls(line);
        std::string field;
        FlowSpec f;
        try {
            if (!std::getline(ls, field, ',')) throw std::invalid_argument("flow_id");
            f.id = std::stoull(field);
            if (!std::getline(ls, field, ',')) throw std::invalid_argument("start");
            f.start = std::stod(field);
            if (!std::getline(ls, field, ',')) throw std::invalid_argument("size");
            f.size = std::stoull(field);
            if (std::getline(ls, field, ',') && !field.empty()) f.deadline = std::stod(field);
        } catch (const std::exception&) {
            throw std::runtime_error("schedule line " + std::to_string(lineno) +
                                     ": malformed row: " + line);
        }
        flows.push_back(f);
    }
    // Replays index flows by id.
    for (std::size_t i = 0; i < flows.size(); ++i) {
        if (flows[i].id != i) {
            throw std::runtime_error("schedule flow ids must be dense and ordered (row " +
                                     std::to_string(i) + ")");
        }
    }
    return flows;
}

}  // namespace qcluster
