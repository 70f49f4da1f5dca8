#include "whnc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "whnc/errors.hpp"

namespace whnc {

namespace {

double rate_of(const Flow& f)
{
    return f.length / f.period;
}

} // namespace

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::Schedulable:
        return "schedulable";
    case Verdict::DeadlineMiss:
        return "deadline-miss";
    case Verdict::Unstable:
        return "unstable";
    }
    return "?";
}

Analyzer::Analyzer(const Network& net, BlockingMode mode)
    : net_(std::make_shared<const Network>(net)),
      maps_(std::make_shared<const PortMaps>(*net_)),
      blocking_(std::make_shared<const BlockingAnalyzer>(*net_, mode))
{
    slots_.resize(net_->flows().size());
    for (std::size_t k = 0; k < slots_.size(); ++k)
        slots_[k].resize(net_->flow(k).path.size());
    propagate();
}

void Analyzer::propagate()
{
    // Nodes come out of the dependency order with every co-buffered burst
    // they need already known.
    for (auto [k, h] : burst_propagation_order(*net_, *maps_)) {
        Slot& s = slots_[k][h];
        if (h == 0) {
            s.arrival = arrival_curve(net_->flow(k));
            continue;
        }
        Slot& prev = slots_[k][h - 1];
        try {
            if (!prev.arrival)
                throw InstabilityError(prev.error);
            prev.service = compute_router_service(k, h - 1);
            s.arrival = deconvolve(*prev.arrival, *prev.service);
        } catch (const InstabilityError& e) {
            if (prev.error.empty())
                prev.error = e.what();
            s.error = e.what();
        }
    }
    // Services of last hops (nobody downstream forced them yet).
    for (std::size_t k = 0; k < slots_.size(); ++k) {
        Slot& last = slots_[k].back();
        if (last.service || !last.error.empty())
            continue;
        try {
            if (!last.arrival)
                throw InstabilityError(last.error);
            last.service = compute_router_service(k, slots_[k].size() - 1);
        } catch (const InstabilityError& e) {
            last.error = e.what();
        }
    }
}

double Analyzer::transit_delay(std::size_t k) const
{
    const Flow& f = net_->flow(k);
    return f.length / net_->capacity() + static_cast<double>(f.path.size()) * net_->epsilon();
}

ServiceCurve Analyzer::aggregate_service(int router, int out_port, int in_port) const
{
    const auto& aggs = maps_->aggregates(router, out_port);
    if (aggs.find(in_port) == aggs.end())
        throw DomainError("no traffic from " + net_->port_label(router, in_port) + " to " +
                          net_->port_label(router, out_port));
    double total = 0.0;
    for (const auto& [p, flows] : aggs)
        for (std::size_t j : flows)
            total += rate_of(net_->flow(j));
    if (!(total > 0.0))
        throw InvalidArgument("degenerate output " + net_->port_label(router, out_port) + ": zero total rate");
    double weight = aggregate_weight(*net_, *maps_, router, out_port, in_port);
    return {weight * net_->capacity(), net_->epsilon()};
}

double Analyzer::demux_delay(int router, std::size_t k) const
{
    auto h = maps_->hop_at(k, router);
    if (!h)
        throw DomainError("flow '" + net_->flow(k).id + "' does not cross router '" + net_->router_name(router) + "'");
    const Hop& hop = net_->flow(k).path[*h];
    double delay = 0.0;
    // Every flow sharing k's input buffer also shares the link feeding it,
    // so all of them are direct blockers of k.
    for (std::size_t j : maps_->sharing_input(router, hop.in_port)) {
        if (j == k || maps_->out_port(j, router) == hop.out_port)
            continue;
        delay += arrival_at(j, *maps_->hop_at(j, router)).burst / net_->capacity();
    }
    return delay;
}

ServiceCurve Analyzer::compute_router_service(std::size_t k, std::size_t h) const
{
    const Hop& hop = net_->flow(k).path[h];
    const auto& aggs = maps_->aggregates(hop.router, hop.out_port);
    double total = 0.0;
    for (const auto& [p, flows] : aggs)
        for (std::size_t j : flows)
            total += rate_of(net_->flow(j));
    std::string where = "flow '" + net_->flow(k).id + "' at " + net_->port_label(hop.router, hop.out_port);
    if (!(total < net_->capacity())) {
        std::ostringstream os;
        os << where << ": output load " << total << " is not below capacity " << net_->capacity();
        throw InstabilityError(os.str());
    }
    try {
        ServiceCurve shifted = delay_shift(aggregate_service(hop.router, hop.out_port, hop.in_port),
                                           demux_delay(hop.router, k));
        std::vector<ArrivalCurve> competitors;
        for (std::size_t j : maps_->aggregate(hop.router, hop.out_port, hop.in_port))
            if (j != k)
                competitors.push_back(arrival_at(j, *maps_->hop_at(j, hop.router)));
        ServiceCurve residual = residual_blind(shifted, sum_arrivals(competitors));
        if (!(rate_of(net_->flow(k)) <= residual.rate * (1.0 + kRelTol))) {
            std::ostringstream os;
            os << "rate " << rate_of(net_->flow(k)) << " exceeds residual rate " << residual.rate;
            throw InstabilityError(os.str());
        }
        return residual;
    } catch (const InstabilityError& e) {
        std::string msg = e.what();
        if (msg.rfind("flow '", 0) == 0)
            throw;
        throw InstabilityError(where + ": " + msg);
    }
}

ServiceCurve Analyzer::router_service(int router, std::size_t k) const
{
    auto h = maps_->hop_at(k, router);
    if (!h)
        throw DomainError("flow '" + net_->flow(k).id + "' does not cross router '" + net_->router_name(router) + "'");
    return service_at(k, *h);
}

ArrivalCurve Analyzer::arrival_at(std::size_t k, std::size_t h) const
{
    const Slot& s = slot(k, h);
    if (s.arrival)
        return *s.arrival;
    if (!s.error.empty())
        throw InstabilityError(s.error);
    throw Error("internal sequencing error: burst of '" + net_->flow(k).id + "' at hop " + std::to_string(h) +
                " requested before it was propagated");
}

ServiceCurve Analyzer::service_at(std::size_t k, std::size_t h) const
{
    const Slot& s = slot(k, h);
    if (s.service)
        return *s.service;
    if (!s.error.empty())
        throw InstabilityError(s.error);
    throw Error("internal sequencing error: service of '" + net_->flow(k).id + "' at hop " + std::to_string(h) +
                " requested before it was computed");
}

ServiceCurve Analyzer::e2e_service(std::size_t k, std::size_t first, std::size_t last) const
{
    ServiceCurve total = ServiceCurve::identity();
    if (first > last)
        return total;
    for (std::size_t h = first; h <= last; ++h)
        total = convolve(total, service_at(k, h));
    return total;
}

ServiceCurve Analyzer::e2e_service(std::size_t k) const
{
    return e2e_service(k, 0, net_->flow(k).path.size() - 1);
}

double Analyzer::direct_delay(std::size_t k, std::size_t first, std::size_t last) const
{
    return hdev(arrival_at(k, first), e2e_service(k, first, last));
}

double Analyzer::direct_delay(std::size_t k) const
{
    return direct_delay(k, 0, net_->flow(k).path.size() - 1);
}

double Analyzer::segment_delay(std::size_t i, const Subpath& segment) const
{
    const Flow& owner = net_->flow(segment.owner);
    const Flow& f = net_->flow(i);
    std::optional<std::size_t> first, last;
    for (std::size_t n = segment.first; n <= segment.last; ++n) {
        auto h = maps_->hop_at(i, owner.path[n].router);
        if (!h)
            continue;
        first = first ? std::min(*first, *h) : *h;
        last = last ? std::max(*last, *h) : *h;
    }
    if (!first)
        throw DomainError("flow '" + f.id + "' does not cross the segment of '" + owner.id + "'");
    return direct_delay(i, *first, *last);
}

double Analyzer::indirect_rec(std::size_t k, const std::vector<bool>& universe, std::size_t depth,
                              IndirectResult& acc, bool top) const
{
    ++acc.calls;
    acc.depth = std::max(acc.depth, depth);
    IndirectSet set = blocking_->indirect_within(k, universe);

    std::vector<bool> reduced = universe;
    for (std::size_t l : set.direct)
        reduced[l] = false;
    bool reduced_empty = std::none_of(reduced.begin(), reduced.end(), [](bool b) { return b; });
    if (reduced_empty || set.flows.empty())
        return 0.0;

    double delay = 0.0;
    for (std::size_t i : set.flows) {
        // Several direct blockers may relay i; keep the worst segment.
        const auto& candidates = set.candidates.at(i);
        IndirectTerm term{i, candidates.front(), -1.0, 0.0};
        for (const Subpath& seg : candidates) {
            double d = segment_delay(i, seg);
            if (d > term.segment_delay) {
                term.segment_delay = d;
                term.segment = seg;
            }
        }
        term.nested = indirect_rec(i, reduced, depth + 1, acc, false);
        delay += term.segment_delay + term.nested;
        if (top)
            acc.terms.push_back(term);
    }
    return delay;
}

IndirectResult Analyzer::indirect_delay(std::size_t k) const
{
    IndirectResult acc;
    std::vector<bool> universe(net_->flows().size(), true);
    acc.delay = indirect_rec(k, universe, 1, acc, true);
    return acc;
}

FlowResult Analyzer::analyze(std::size_t k) const
{
    const Flow& f = net_->flow(k);
    FlowResult r;
    r.id = f.id;
    r.deadline = f.deadline;
    r.transit = transit_delay(k);
    for (std::size_t h = 0; h < f.path.size(); ++h) {
        const Slot& s = slot(k, h);
        r.bursts.push_back(s.arrival ? s.arrival->burst : std::numeric_limits<double>::infinity());
    }
    try {
        r.direct = direct_delay(k);
        IndirectResult ind = indirect_delay(k);
        r.indirect = ind.delay;
        r.indirect_terms = std::move(ind.terms);
        r.recursion_depth = ind.depth;
        r.total = r.direct + r.indirect;
        r.verdict = r.total <= r.deadline ? Verdict::Schedulable : Verdict::DeadlineMiss;
    } catch (const InstabilityError& e) {
        const double inf = std::numeric_limits<double>::infinity();
        r.direct = r.indirect = r.total = inf;
        r.verdict = Verdict::Unstable;
        r.diagnostic = e.what();
    }
    return r;
}

std::vector<FlowResult> Analyzer::analyze_all() const
{
    std::vector<FlowResult> out;
    out.reserve(net_->flows().size());
    for (std::size_t k = 0; k < net_->flows().size(); ++k)
        out.push_back(analyze(k));
    return out;
}

std::vector<FlowResult> analyze_all(const Network& net, BlockingMode mode)
{
    return Analyzer(net, mode).analyze_all();
}

} // namespace whnc
