#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

#include "whnc/errors.hpp"
#include "whnc/model.hpp"

namespace whnc {

namespace {

double rate_of(const Flow& f)
{
    return f.length / f.period;
}

double aggregate_rate(const Network& net, const std::vector<std::size_t>& flows)
{
    double r = 0.0;
    for (std::size_t k : flows)
        r += rate_of(net.flow(k));
    return r;
}

struct Kahn {
    std::vector<std::pair<std::size_t, std::size_t>> order;
    std::vector<std::size_t> leftover_flows;
};

Kahn run_kahn(const Network& net, const PortMaps& maps)
{
    const auto& flows = net.flows();
    std::vector<std::size_t> offset(flows.size() + 1, 0);
    for (std::size_t k = 0; k < flows.size(); ++k)
        offset[k + 1] = offset[k] + flows[k].path.size();
    std::size_t n = offset.back();

    std::vector<std::vector<std::size_t>> succ(n);
    std::vector<std::size_t> indeg(n, 0);
    auto edge = [&](std::size_t from, std::size_t to) {
        succ[from].push_back(to);
        ++indeg[to];
    };
    for (std::size_t k = 0; k < flows.size(); ++k) {
        const Flow& f = flows[k];
        for (std::size_t h = 0; h + 1 < f.path.size(); ++h) {
            std::size_t next = offset[k] + h + 1;
            edge(offset[k] + h, next);
            for (std::size_t j : maps.sharing_input(f.path[h].router, f.path[h].in_port)) {
                if (j == k)
                    continue;
                edge(offset[j] + *maps.hop_at(j, f.path[h].router), next);
            }
        }
    }

    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t v = 0; v < n; ++v)
        if (indeg[v] == 0)
            ready.push(v);
    Kahn result;
    std::vector<bool> done(n, false);
    while (!ready.empty()) {
        std::size_t v = ready.top();
        ready.pop();
        done[v] = true;
        std::size_t k = std::upper_bound(offset.begin(), offset.end(), v) - offset.begin() - 1;
        result.order.emplace_back(k, v - offset[k]);
        for (std::size_t w : succ[v])
            if (--indeg[w] == 0)
                ready.push(w);
    }
    std::set<std::size_t> stuck;
    for (std::size_t v = 0; v < n; ++v)
        if (!done[v]) {
            std::size_t k = std::upper_bound(offset.begin(), offset.end(), v) - offset.begin() - 1;
            stuck.insert(k);
        }
    result.leftover_flows.assign(stuck.begin(), stuck.end());
    return result;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

double aggregate_weight(const Network& net, const PortMaps& maps, int router, int out_port, int in_port)
{
    double total = 0.0;
    for (const auto& [p, flows] : maps.aggregates(router, out_port))
        total += aggregate_rate(net, flows);
    if (total <= 0.0)
        throw InvalidArgument("no traffic at output " + net.port_label(router, out_port));
    return aggregate_rate(net, maps.aggregate(router, out_port, in_port)) / total;
}

std::vector<std::pair<std::size_t, std::size_t>> burst_propagation_order(const Network& net, const PortMaps& maps)
{
    Kahn k = run_kahn(net, maps);
    if (!k.leftover_flows.empty()) {
        std::string names;
        for (std::size_t f : k.leftover_flows)
            names += (names.empty() ? "" : ", ") + net.flow(f).id;
        throw CycleError("burst propagation is not feed-forward; cyclic dependency among flows {" + names + "}");
    }
    return std::move(k.order);
}

std::vector<std::size_t> burst_dependency_cycle(const Network& net, const PortMaps& maps)
{
    return run_kahn(net, maps).leftover_flows;
}

bool ValidationReport::has(ViolationKind kind) const
{
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

const char* to_string(ViolationKind kind)
{
    switch (kind) {
    case ViolationKind::Overload:
        return "overload";
    case ViolationKind::WeightedShare:
        return "weighted-share";
    case ViolationKind::Buffer:
        return "buffer";
    case ViolationKind::Cycle:
        return "cycle";
    }
    return "?";
}

ValidationReport validate(const Network& net)
{
    ValidationReport report;
    PortMaps maps(net);
    const double c = net.capacity();

    for (auto [router, out] : maps.busy_outputs()) {
        const auto& aggs = maps.aggregates(router, out);
        double total = 0.0;
        for (const auto& [p, flows] : aggs)
            total += aggregate_rate(net, flows);
        if (!(total < c))
            report.violations.push_back({ViolationKind::Overload, "output " + net.port_label(router, out) +
                                                                       ": total rate " + fmt(total) +
                                                                       " is not below capacity " + fmt(c)});
        for (const auto& [p, flows] : aggs) {
            double share = aggregate_rate(net, flows) / total * c;
            for (std::size_t k : flows) {
                double r = rate_of(net.flow(k));
                if (r > share * (1.0 + kRelTol))
                    report.violations.push_back(
                        {ViolationKind::WeightedShare, "flow '" + net.flow(k).id + "' at output " +
                                                           net.port_label(router, out) + " from " +
                                                           net.port_name(router, p) + ": rate " + fmt(r) +
                                                           " exceeds weighted share " + fmt(share)});
            }
        }
    }

    if (!(net.buffer() >= 1.0))
        report.violations.push_back({ViolationKind::Buffer, "buffer " + fmt(net.buffer()) + " is below 1 byte"});
    std::set<std::pair<int, int>> seen;
    for (std::size_t k = 0; k < net.flows().size(); ++k)
        for (const Hop& h : net.flow(k).path) {
            double b = net.buffer_at(h.router, h.in_port);
            if (b != net.buffer() && !(b >= 1.0) && seen.emplace(h.router, h.in_port).second)
                report.violations.push_back({ViolationKind::Buffer, "buffer at " + net.port_label(h.router, h.in_port) +
                                                                        " is below 1 byte"});
        }

    auto cyclic = burst_dependency_cycle(net, maps);
    if (!cyclic.empty()) {
        std::string names;
        for (std::size_t f : cyclic)
            names += (names.empty() ? "" : ", ") + net.flow(f).id;
        report.violations.push_back({ViolationKind::Cycle, "burst propagation is not feed-forward among {" + names + "}"});
    }
    return report;
}

} // namespace whnc
