// analysis.hpp - End-to-end delay bounds for wormhole flows.
//
// Per router R and flow k, the output port shares its capacity among the
// input-port aggregates F_l^p in proportion to their rates. The aggregate of
// k is further delayed by the bursts of co-buffered flows heading to other
// outputs (head-of-line, applied as one Dirac shift), and k itself gets the
// blind-multiplexing residual of that service once its co-aggregate flows are
// served. Concatenating these residuals along a path yields the service used
// for the direct delay bound; indirect blocking is added by a recursion over
// the indirect blocking sets.

#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "whnc/blocking.hpp"
#include "whnc/minplus.hpp"
#include "whnc/model.hpp"

namespace whnc {

enum class Verdict { Schedulable, DeadlineMiss, Unstable };

const char* to_string(Verdict v);

struct IndirectTerm {
    std::size_t flow = 0;
    Subpath segment;
    // D_DB of `flow` over `segment`.
    double segment_delay = 0.0;
    // Indirect delay of `flow` itself, from the nested recursion.
    double nested = 0.0;
};

struct IndirectResult {
    double delay = 0.0;
    std::vector<IndirectTerm> terms;  // top level only
    std::size_t depth = 0;            // number of nested calls on the deepest chain
    std::size_t calls = 0;
};

struct FlowResult {
    std::string id;
    double transit = 0.0;   // contention-free L/C + n*eps
    double direct = 0.0;    // transmission + direct blocking
    double indirect = 0.0;
    double total = 0.0;     // direct + indirect
    double deadline = 0.0;
    Verdict verdict = Verdict::Schedulable;
    std::vector<double> bursts;  // burst at the input of each router on the path
    std::vector<IndirectTerm> indirect_terms;
    std::size_t recursion_depth = 0;
    std::string diagnostic;

    // Blocking part of the bound, total - transit.
    double blocking() const { return total - transit; }
};

class Analyzer {
public:
    // Propagates bursts over the whole network; throws CycleError if the
    // propagation is not feed-forward.
    Analyzer(const Network& net, BlockingMode mode);

    const Network& network() const { return *net_; }
    const PortMaps& maps() const { return *maps_; }
    const BlockingAnalyzer& blocking() const { return *blocking_; }

    double transit_delay(std::size_t k) const;

    // Service of output port l to the aggregate coming from input port p.
    ServiceCurve aggregate_service(int router, int out_port, int in_port) const;

    // Head-of-line delay of k's aggregate at `router`.
    double demux_delay(int router, std::size_t k) const;

    // Residual service of `router` to flow k.
    ServiceCurve router_service(int router, std::size_t k) const;

    // Envelope of k at the input of its hop `h`.
    ArrivalCurve arrival_at(std::size_t k, std::size_t h) const;
    ServiceCurve service_at(std::size_t k, std::size_t h) const;

    // Concatenated residual service over hops [first, last] of k; an empty
    // range gives the identity.
    ServiceCurve e2e_service(std::size_t k, std::size_t first, std::size_t last) const;
    ServiceCurve e2e_service(std::size_t k) const;

    double direct_delay(std::size_t k, std::size_t first, std::size_t last) const;
    double direct_delay(std::size_t k) const;

    // Direct delay of i over the routers it shares with `segment`, entering
    // with its envelope at the first of them.
    double segment_delay(std::size_t i, const Subpath& segment) const;

    IndirectResult indirect_delay(std::size_t k) const;

    FlowResult analyze(std::size_t k) const;
    std::vector<FlowResult> analyze_all() const;

private:
    struct Slot {
        std::optional<ArrivalCurve> arrival;
        std::optional<ServiceCurve> service;
        std::string error;
    };

    void propagate();
    ServiceCurve compute_router_service(std::size_t k, std::size_t h) const;
    const Slot& slot(std::size_t k, std::size_t h) const { return slots_[k][h]; }
    double indirect_rec(std::size_t k, const std::vector<bool>& universe, std::size_t depth, IndirectResult& acc,
                        bool top) const;

    std::shared_ptr<const Network> net_;
    std::shared_ptr<const PortMaps> maps_;
    std::shared_ptr<const BlockingAnalyzer> blocking_;
    std::vector<std::vector<Slot>> slots_;
};

// Analyzes every flow with the network's configured buffer.
std::vector<FlowResult> analyze_all(const Network& net, BlockingMode mode);

} // namespace whnc
