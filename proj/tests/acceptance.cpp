// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracle/blocking_oracle.hpp"
#include "support/fixtures.hpp"
#include "support/oracle_check.hpp"
#include "support/random_instances.hpp"
#include "whnc/analysis.hpp"
#include "whnc/blocking.hpp"
#include "whnc/cli.hpp"
#include "whnc/simulator.hpp"

using namespace whnc;
using namespace whnc::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> buffer_grid()
{
    std::vector<double> out;
    for (double b = 1; b <= 1024; b *= 2)
        out.push_back(b);
    return out;
}

std::vector<std::string> flow_ids(const Network& net, const std::vector<std::size_t>& flows)
{
    std::vector<std::string> out;
    for (std::size_t k : flows)
        out.push_back(net.flow(k).id);
    return out;
}

Outcome oracle_equivalence()
{
    auto start = Clock::now();
    int failures = 0;
    std::string first;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed)
        if (auto why = compare_with_oracle(random_oracle_instance(seed)); why && failures++ == 0)
            first = "seed " + std::to_string(seed) + ": " + *why;
    double took = seconds_since(start);
    std::ostringstream os;
    os << "1000 instances, " << failures << " mismatches, " << took << " s (limit 60 s)";
    if (failures)
        os << "; first " << first;
    return {failures == 0 && took < 60.0, os.str()};
}

Outcome hops_micro_check()
{
    Network net = fixture_network("net_y.json");
    std::size_t f1 = flow_index(net, "f1");
    auto aware = BlockingAnalyzer(net, BlockingMode::BufferAware).indirect(f1).flows;
    auto conv = BlockingAnalyzer(net, BlockingMode::Conventional).indirect(f1).flows;
    std::size_t h = hops(100, 56);
    bool ok = h == 2 && aware.empty() && flow_ids(net, conv) == std::vector<std::string>{"f3"};
    std::ostringstream os;
    os << "hops(100, 56) = " << h << ", F_IB(f1) at 56 has " << aware.size() << " flows, conventional {";
    for (const auto& id : flow_ids(net, conv))
        os << " " << id;
    os << " }";
    return {ok, os.str()};
}

Outcome monotonicity()
{
    auto start = Clock::now();
    int subset = 0, delay = 0, dominance = 0;
    std::string first;
    auto note = [&](std::uint64_t seed, double b, std::size_t k, const char* what) {
        if (first.empty())
            first = std::string(what) + " at seed " + std::to_string(seed) + " buffer " +
                    std::to_string(static_cast<int>(b)) + " flow " + std::to_string(k);
    };
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        Network base = Network::build(random_document(seed));
        std::size_t n = base.flows().size();
        std::vector<std::vector<std::size_t>> prev_set(n);
        std::vector<double> prev_total(n, 0.0);
        bool first_buffer = true;
        for (double b : buffer_grid()) {
            Network net = base.with_buffer(b);
            Analyzer aware(net, BlockingMode::BufferAware), conv(net, BlockingMode::Conventional);
            for (std::size_t k = 0; k < n; ++k) {
                FlowResult ra = aware.analyze(k), rc = conv.analyze(k);
                auto set = aware.blocking().indirect(k).flows;
                if (!first_buffer) {
                    if (!std::includes(prev_set[k].begin(), prev_set[k].end(), set.begin(), set.end()))
                        ++subset, note(seed, b, k, "F_IB grew");
                    if (ra.total > prev_total[k] + 1e-9)
                        ++delay, note(seed, b, k, "D_eed grew");
                }
                if (ra.total > rc.total + 1e-9)
                    ++dominance, note(seed, b, k, "aware above conventional");
                prev_set[k] = set;
                prev_total[k] = ra.total;
            }
            first_buffer = false;
        }
    }
    double took = seconds_since(start);
    std::ostringstream os;
    os << "200 instances x 11 buffers: " << subset << " F_IB, " << delay << " D_eed, " << dominance
       << " dominance violations, " << took << " s (limit 300 s)";
    if (!first.empty())
        os << "; first " << first;
    return {subset + delay + dominance == 0 && took < 300.0, os.str()};
}

Outcome recursion_contract()
{
    int bad_depth = 0, nonzero_empty = 0, runs = 0;
    std::size_t deepest = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        Network base = Network::build(random_document(seed));
        for (double b : {1.0, 4.0, 16.0, 64.0}) {
            Network net = base.with_buffer(b);
            for (BlockingMode mode : {BlockingMode::BufferAware, BlockingMode::Conventional}) {
                Analyzer a(net, mode);
                for (std::size_t k = 0; k < net.flows().size(); ++k) {
                    IndirectResult r = a.indirect_delay(k);
                    ++runs;
                    deepest = std::max(deepest, r.depth);
                    if (r.depth > net.flows().size())
                        ++bad_depth;
                    if (a.blocking().indirect(k).flows.empty() && r.delay != 0.0)
                        ++nonzero_empty;
                }
            }
        }
    }
    std::ostringstream os;
    os << runs << " runs terminated, deepest recursion " << deepest << ", " << bad_depth << " deeper than |F|, "
       << nonzero_empty << " non-zero results for an empty F_IB";
    return {bad_depth == 0 && nonzero_empty == 0, os.str()};
}

// Shrinks the link capacity until the busiest output is loaded to `load`.
Document overloaded(std::uint64_t seed, double load)
{
    Document doc = random_document(seed);
    Network net = Network::build(doc);
    PortMaps maps(net);
    double busiest = 0.0;
    for (auto [router, out] : maps.busy_outputs()) {
        double sum = 0.0;
        for (const auto& [in, flows] : maps.aggregates(router, out))
            for (std::size_t k : flows)
                sum += arrival_curve(net.flow(k)).rate;
        busiest = std::max(busiest, sum);
    }
    doc.network.capacity = busiest / load;
    return doc;
}

Outcome stability()
{
    int instances = 0, finite = 0, missing_unstable = 0, wrong_exit = 0;
    auto dir = std::filesystem::temp_directory_path() / "whnc_acceptance";
    std::filesystem::create_directories(dir);
    auto check = [&](const Document& doc, const std::string& name) {
        ++instances;
        Network net = Network::build(doc);
        bool any_unstable = false;
        for (const FlowResult& r : analyze_all(net, BlockingMode::BufferAware)) {
            if (r.verdict == Verdict::Unstable) {
                any_unstable = true;
                if (std::isfinite(r.total))
                    ++finite;
            }
        }
        if (!any_unstable)
            ++missing_unstable;
        auto path = (dir / name).string();
        std::ofstream(path) << serialize_config(doc);
        std::ostringstream out, err;
        if (run_cli({"analyze", path}, out, err) != kExitInvalid)
            ++wrong_exit;
    };
    check(fixture_document("overloaded.json"), "overloaded.json");
    for (std::uint64_t seed = 1; seed <= 50; ++seed)
        for (double load : {1.0, 1.5})
            check(overloaded(seed, load), "over_" + std::to_string(seed) + "_" + std::to_string(load) + ".json");
    std::ostringstream os;
    os << instances << " unstable instances: " << missing_unstable << " without an unstable verdict, " << finite
       << " finite bounds on unstable flows, " << wrong_exit << " exits other than 2";
    return {instances > 0 && finite == 0 && missing_unstable == 0 && wrong_exit == 0, os.str()};
}

Outcome soundness()
{
    auto start = Clock::now();
    int instances = 0, flows = 0, violations = 0, deadlocks = 0, violating_instances = 0;
    double worst = 0.0;
    std::string worst_at;
    auto run = [&](const Network& net, const SimOptions& opt, std::uint64_t seed, const std::string& label) {
        ++instances;
        auto bounds = analyze_all(net, BlockingMode::BufferAware);
        SimReport sim = sweep_offsets(net, opt, 100, seed);
        if (sim.outcome != SimOutcome::Completed)
            ++deadlocks;
        bool bad = false;
        for (std::size_t k = 0; k < bounds.size(); ++k) {
            ++flows;
            double ratio = sim.flows[k].max_latency / bounds[k].total;
            if (ratio > worst) {
                worst = ratio;
                worst_at = label + " flow " + net.flow(k).id;
            }
            if (sim.flows[k].max_latency > bounds[k].total)
                ++violations, bad = true;
        }
        if (bad)
            ++violating_instances;
    };

    Document ny = fixture_document("net_y.json");
    Network net_y = Network::build(ny);
    run(net_y, sim_options(net_y, *ny.sim), ny.sim->seed, "NET-Y");

    int random_instances = 0;
    for (std::uint64_t seed = 1; random_instances < 50; ++seed) {
        Network net = Network::build(random_document(seed));
        if (!validate(net).ok())
            continue;
        bool stable = true;
        for (const FlowResult& r : analyze_all(net, BlockingMode::BufferAware))
            stable = stable && r.verdict != Verdict::Unstable;
        if (!stable)
            continue;
        ++random_instances;
        SimOptions opt;
        double longest = 0.0;
        for (const Flow& f : net.flows())
            longest = std::max(longest, f.period);
        opt.horizon = 4 * longest;
        opt.seed = seed;
        run(net, opt, seed, "seed " + std::to_string(seed));
    }
    double took = seconds_since(start);
    std::ostringstream os;
    os << instances << " instances x 100 trials, " << flows << " flows: " << violations << " above the bound in "
       << violating_instances << " instances, " << deadlocks << " deadlocks, worst ratio " << worst << " ("
       << worst_at << "), " << took << " s (limit 600 s)";
    return {violations == 0 && deadlocks == 0 && took < 600.0, os.str()};
}

Outcome contention_free()
{
    int runs = 0, off = 0;
    double worst = 0.0;
    for (int n : {2, 3, 4, 7, 10})
        for (double capacity : {1.0, 100.0, 3.0})
            for (double eps : {0.0, 1.0, 0.75})
                for (double length : {1.0, 64.0, 100.0})
                    for (double flit : {1.0, 3.0}) {
                        Network net = Network::build(chain_document(n, capacity, eps, 16, length, 500));
                        SimOptions opt;
                        opt.horizon = 1000;
                        opt.flit_size = flit;
                        SimReport r = simulate(net, opt);
                        Analyzer a(net, BlockingMode::BufferAware);
                        double gap = std::abs(r.flows[0].max_latency - a.transit_delay(0));
                        ++runs;
                        worst = std::max(worst, gap / r.tick);
                        if (gap > r.tick + 1e-9)
                            ++off;
                    }
    std::ostringstream os;
    os << runs << " single-flow runs, " << off << " off by more than one tick, largest gap " << worst << " ticks";
    return {off == 0, os.str()};
}

Outcome sweep_behavior()
{
    Network base = fixture_network("net_y.json");
    std::size_t n = base.flows().size();
    std::vector<double> conv_first(n), prev(n);
    int conv_changes = 0, strict_decreases = 0, increases = 0;
    for (int b = 1; b <= 1000; ++b) {
        Network net = base.with_buffer(b);
        auto conv = analyze_all(net, BlockingMode::Conventional);
        auto aware = analyze_all(net, BlockingMode::BufferAware);
        for (std::size_t k = 0; k < n; ++k) {
            if (b == 1)
                conv_first[k] = conv[k].total;
            else {
                if (conv[k].total != conv_first[k])
                    ++conv_changes;
                if (aware[k].total < prev[k])
                    ++strict_decreases;
                if (aware[k].total > prev[k])
                    ++increases;
            }
            prev[k] = aware[k].total;
        }
    }
    std::ostringstream os;
    os << "buffers 1..1000: conventional changes " << conv_changes << ", buffer-aware strict decreases "
       << strict_decreases << ", increases " << increases;
    return {conv_changes == 0 && strict_decreases > 0 && increases == 0, os.str()};
}

} // namespace

int main()
{
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"min-plus oracle equivalence", oracle_equivalence},
        {"hops micro-check", hops_micro_check},
        {"monotonicity suite", monotonicity},
        {"indirect recursion contract", recursion_contract},
        {"stability handling", stability},
        {"soundness vs simulator", soundness},
        {"contention-free exactness", contention_free},
        {"sweep behavior", sweep_behavior},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
