#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>

#include "oracles.hpp"
#include "qcluster/baseline.hpp"
#include "qcluster/metrics.hpp"
#include "qcluster/rng.hpp"
#include "qcluster/sim.hpp"
#include "qcluster/workload.hpp"

using namespace qcluster;

namespace {

PortConfig port_10g() {
    PortConfig port;
    port.buffer_bytes = 1ull << 30;
    return port;
}

SourceModel instant() {
    SourceModel src;
    src.access_rate = kInf;
    return src;
}

double mean_fct(const TraceLog& log, std::function<bool(const FlowRecord&)> pred) {
    double sum = 0.0;
    int n = 0;
    for (const auto& f : log.flows) {
        if (f.complete() && pred(f)) {
            sum += f.fct();
            ++n;
        }
    }
    REQUIRE(n > 0);
    return sum / n;
}

}  // namespace

TEST_CASE("static LAS files packets by bytes already sent") {
    std::vector<PacketRecord> packets;
    StaticLasScheduler sched(2, {10'000.0});
    sched.bind_packets(&packets);

    // A flow that has sent 5KB stays in the first queue.
    for (std::uint32_t s = 0; s < 8; ++s) {
        PacketRecord rec;
        rec.flow_id = 1;
        rec.seq = s;
        rec.size = 1000;
        packets.push_back(rec);
        int q = sched.enqueue(packets.size() - 1, rec, 0.0);
        CHECK(q == 0);  // bytes sent stays below 10KB for all 8 packets
    }
    // Pushing past the boundary demotes, and demotion is monotone.
    int last = 0;
    for (std::uint32_t s = 8; s < 30; ++s) {
        PacketRecord rec;
        rec.flow_id = 1;
        rec.seq = s;
        rec.size = 1000;
        packets.push_back(rec);
        int q = sched.enqueue(packets.size() - 1, rec, 0.0);
        CHECK(q >= last);
        last = q;
    }
    CHECK(last == 1);
}

TEST_CASE("static LAS rejects unsorted thresholds") {
    CHECK_THROWS(StaticLasScheduler(3, {100.0, 50.0}));
    CHECK_THROWS(StaticLasScheduler(3, {100.0}));
}

TEST_CASE("the worst-case preset puts ~60% of packets in the first queue, ~30% in the last") {
    std::vector<FlowSpec> flows;
    Rng rng(21);
    for (int i = 0; i < 400; ++i) {
        std::uint64_t size = 1500ull * (1 + rng.below(40));
        flows.push_back({static_cast<FlowId>(i), 1e-5 * i, size, kNoDeadline});
    }
    auto thresholds = worst_case_thresholds(flows, 8, 1500);
    REQUIRE(thresholds.size() == 7);
    CHECK(std::is_sorted(thresholds.begin(), thresholds.end()));

    std::uint64_t total = 0, first = 0, last = 0;
    for (const auto& f : flows) {
        std::uint64_t sent = 0;
        while (sent < f.size) {
            ++total;
            if (static_cast<double>(sent) < thresholds.front()) ++first;
            if (static_cast<double>(sent) >= thresholds.back()) ++last;
            sent += std::min<std::uint64_t>(1500, f.size - sent);
        }
    }
    CHECK(static_cast<double>(first) / total == doctest::Approx(0.60).epsilon(0.08));
    CHECK(static_cast<double>(last) / total == doctest::Approx(0.30).epsilon(0.08));
}

TEST_CASE("mis-set thresholds hurt small flows against well-set ones") {
    SizeCdf cdf("tail", {{730, 0.4}, {1460, 0.55}, {14'600, 0.8}, {146'000, 0.95},
                         {730'000, 1.0}});
    PortConfig port = port_10g();
    int worse = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        Rng rng(seed);
        auto flows = generate_flows(cdf, 0.8, port.line_rate, 1200, rng);
        auto small = [](const FlowRecord& f) { return f.size <= 1000; };

        StaticLasScheduler worst(8, worst_case_thresholds(flows, 8, port.mtu));
        TraceLog worst_log = simulate(flows, port, SourceModel{}, worst);

        std::vector<double> good_thresholds;
        for (int i = 0; i < 7; ++i) good_thresholds.push_back(1460.0 * std::pow(2.0, i));
        StaticLasScheduler good(8, good_thresholds);
        TraceLog good_log = simulate(flows, port, SourceModel{}, good);

        if (mean_fct(worst_log, small) > mean_fct(good_log, small)) ++worse;
    }
    CHECK(worse >= 2);
}

TEST_CASE("two backlogged flows alternate under ideal fair queueing") {
    PortConfig port = port_10g();
    std::vector<FlowSpec> flows = {{0, 0.0, 15'000, kNoDeadline}, {1, 0.0, 15'000, kNoDeadline}};
    IdealFqScheduler fq(port.line_rate);
    TraceLog log = simulate(flows, port, instant(), fq);

    std::vector<const PacketRecord*> delivered;
    for (const auto& p : log.packets) delivered.push_back(&p);
    std::sort(delivered.begin(), delivered.end(),
              [](const auto* a, const auto* b) { return a->departure < b->departure; });
    int run = 1, max_run = 1;
    for (std::size_t i = 1; i < delivered.size(); ++i) {
        run = delivered[i]->flow_id == delivered[i - 1]->flow_id ? run + 1 : 1;
        max_run = std::max(max_run, run);
    }
    CHECK(max_run <= 2);  // never more than one extra packet of the same flow in a row
}

TEST_CASE("ideal fair queueing matches the fluid oracle on small scenarios") {
    PortConfig port = port_10g();
    double mtu_time = serialization_time(port.mtu, port.line_rate);
    std::vector<std::vector<FlowSpec>> scenarios = {
        {{0, 0.0, 30'000, kNoDeadline}, {1, 0.0, 15'000, kNoDeadline}, {2, 0.0, 7'500, kNoDeadline}},
        {{0, 0.0, 45'000, kNoDeadline}, {1, 13e-6, 15'000, kNoDeadline}, {2, 2e-6, 4'500, kNoDeadline}},
        {{0, 0.0, 7'500, kNoDeadline}, {1, 1e-6, 7'500, kNoDeadline}, {2, 30e-6, 30'000, kNoDeadline}},
    };
    for (const auto& flows : scenarios) {
        IdealFqScheduler fq(port.line_rate);
        TraceLog log = simulate(flows, port, instant(), fq);
        std::vector<std::pair<double, double>> fluid_in;
        for (const auto& f : flows) {
            fluid_in.push_back({f.start, static_cast<double>(f.size)});
        }
        auto fluid = oracle::fluid_ps_finish_times(fluid_in, port.line_rate);
        for (std::size_t i = 0; i < flows.size(); ++i) {
            REQUIRE(log.flows[i].complete());
            double sim_fct = log.flows[i].fct();
            double fluid_fct = fluid[i] - flows[i].start;
            CHECK(std::abs(sim_fct - fluid_fct) <= mtu_time + 1e-12);
        }
    }
}

TEST_CASE("equal concurrent flows get a Jain index of one under ideal fair queueing") {
    PortConfig port = port_10g();
    std::vector<FlowSpec> flows;
    for (int i = 0; i < 8; ++i) flows.push_back({static_cast<FlowId>(i), 0.0, 30'000, kNoDeadline});
    IdealFqScheduler fq(port.line_rate);
    TraceLog log = simulate(flows, port, instant(), fq);
    std::vector<double> throughputs;
    for (const auto& f : log.flows) throughputs.push_back(static_cast<double>(f.size) / f.fct());
    CHECK(jain_index(throughputs) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("ideal SRPT finishes the small flow first") {
    PortConfig port = port_10g();
    std::vector<FlowSpec> flows = {{0, 0.0, 10'000, kNoDeadline}, {1, 0.0, 1'000, kNoDeadline}};
    IdealSrptScheduler srpt;
    TraceLog log = simulate(flows, port, instant(), srpt);
    CHECK(log.flows[1].end < log.flows[0].end);
}

namespace {

// Exhaustive minimum mean FCT over work-conserving packetized schedules.
struct BruteForce {
    struct Flow {
        double start;
        std::vector<std::uint32_t> sizes;
    };
    std::vector<Flow> flows;
    double rate;
    double best = kInf;

    void search(double now, std::vector<std::size_t>& sent, std::vector<double>& finish) {
        bool all_done = true;
        std::vector<std::size_t> ready;
        double next_arrival = kInf;
        for (std::size_t i = 0; i < flows.size(); ++i) {
            if (sent[i] < flows[i].sizes.size()) {
                all_done = false;
                if (flows[i].start <= now + 1e-15) {
                    ready.push_back(i);
                } else {
                    next_arrival = std::min(next_arrival, flows[i].start);
                }
            }
        }
        if (all_done) {
            double total = 0.0;
            for (std::size_t i = 0; i < flows.size(); ++i) total += finish[i] - flows[i].start;
            best = std::min(best, total / static_cast<double>(flows.size()));
            return;
        }
        if (ready.empty()) {
            search(next_arrival, sent, finish);
            return;
        }
        for (std::size_t i : ready) {
            double done = now + serialization_time(flows[i].sizes[sent[i]], rate);
            sent[i] += 1;
            double old_finish = finish[i];
            finish[i] = done;
            search(done, sent, finish);
            finish[i] = old_finish;
            sent[i] -= 1;
        }
    }
};

}  // namespace

TEST_CASE("ideal SRPT attains the brute-force optimal mean FCT") {
    PortConfig port = port_10g();
    std::vector<std::vector<FlowSpec>> scenarios = {
        {{0, 0.0, 4'500, kNoDeadline}, {1, 1e-6, 1'500, kNoDeadline}, {2, 2e-6, 3'000, kNoDeadline}},
        {{0, 0.0, 6'000, kNoDeadline}, {1, 2.5e-6, 3'000, kNoDeadline}, {2, 4e-6, 1'500, kNoDeadline}},
        {{0, 0.0, 3'000, kNoDeadline}, {1, 10e-6, 3'000, kNoDeadline}, {2, 11e-6, 4'500, kNoDeadline}},
    };
    for (const auto& flows : scenarios) {
        IdealSrptScheduler srpt;
        TraceLog log = simulate(flows, port, instant(), srpt);
        double sim_mean = 0.0;
        for (const auto& f : log.flows) {
            REQUIRE(f.complete());
            sim_mean += f.fct();
        }
        sim_mean /= static_cast<double>(log.flows.size());

        BruteForce bf;
        bf.rate = port.line_rate;
        for (const auto& f : flows) {
            BruteForce::Flow bff;
            bff.start = f.start;
            std::uint64_t sent = 0;
            while (sent < f.size) {
                std::uint32_t bytes =
                    static_cast<std::uint32_t>(std::min<std::uint64_t>(port.mtu, f.size - sent));
                bff.sizes.push_back(bytes);
                sent += bytes;
            }
            bf.flows.push_back(bff);
        }
        std::vector<std::size_t> sent(flows.size(), 0);
        std::vector<double> finish(flows.size(), 0.0);
        double first = kInf;
        for (const auto& f : flows) first = std::min(first, f.start);
        bf.search(first, sent, finish);

        CHECK(sim_mean == doctest::Approx(bf.best).epsilon(1e-9));
    }
}

TEST_CASE("ideal SRPT never loses to FIFO on mean FCT") {
    SizeCdf cdf("tail", {{730, 0.4}, {7'300, 0.8}, {73'000, 1.0}});
    PortConfig port = port_10g();
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed);
        auto flows = generate_flows(cdf, 0.75, port.line_rate, 300, rng);
        IdealSrptScheduler srpt;
        TraceLog srpt_log = simulate(flows, port, SourceModel{}, srpt);
        FifoScheduler fifo;
        TraceLog fifo_log = simulate(flows, port, SourceModel{}, fifo);
        auto any = [](const FlowRecord&) { return true; };
        CHECK(mean_fct(srpt_log, any) <= mean_fct(fifo_log, any) + 1e-12);
    }
}
