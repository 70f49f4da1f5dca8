// model.hpp - Network and traffic model: configuration document, the
// compiled (index-based) network, per-port flow partitions and validation.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "whnc/minplus.hpp"

namespace whnc {

inline constexpr int kSchemaVersion = 1;

// --- Configuration document (names, as written in the input file) ---------

struct RouterSpec {
    std::string id;
    std::vector<std::string> ports;
};

struct LinkSpec {
    std::string from;
    std::string from_port;
    std::string to;
    std::string to_port;
};

struct BufferOverride {
    std::string router;
    std::string port;
    double bytes = 0.0;
};

struct NetworkSpec {
    double capacity = 0.0;
    double epsilon = 0.0;
    double buffer = 0.0;
    std::string time_unit = "tu";
    std::vector<RouterSpec> routers;
    std::vector<LinkSpec> links;
    std::vector<BufferOverride> buffer_overrides;
};

struct HopSpec {
    std::string router;
    std::string in_port;
    std::string out_port;
};

struct FlowSpec {
    std::string id;
    double period = 0.0;
    double deadline = 0.0;
    double length = 0.0;
    double jitter = 0.0;
    std::vector<HopSpec> path;
};

struct SimSpec {
    double horizon = 0.0;
    int trials = 1;
    std::uint64_t seed = 1;
    double flit_size = 1.0;
    std::map<std::string, double> offsets;
};

struct Document {
    NetworkSpec network;
    std::vector<FlowSpec> flows;
    std::optional<SimSpec> sim;
};

// Parses the JSON document; errors name the offending JSON path.
Document parse_config(std::string_view text);
Document load_config(const std::string& path);

// Canonical JSON form (stable key order, schema tag included).
std::string serialize_config(const Document& doc);

// --- Compiled network -------------------------------------------------------

struct Hop {
    int router = -1;
    int in_port = -1;
    int out_port = -1;
};

struct Flow {
    std::string id;
    double period = 0.0;
    double deadline = 0.0;
    double length = 0.0;
    double jitter = 0.0;
    std::vector<Hop> path;

    std::size_t routers() const { return path.size(); }
};

// Identifier of a physical link a flow can contend for. Outgoing links are
// keyed by (router, output port) and cover both router-to-router links and
// ejection to the local node; injection links are keyed by the receiving
// (router, input port) of the first hop.
using LinkId = int;

class Network {
public:
    // Resolves every name and checks connectivity; throws ParseError.
    static Network build(const Document& doc);

    double capacity() const { return capacity_; }
    double epsilon() const { return epsilon_; }
    double buffer() const { return buffer_; }
    const std::string& time_unit() const { return time_unit_; }

    std::size_t router_count() const { return router_names_.size(); }
    std::size_t port_count(int router) const { return port_names_[router].size(); }
    const std::string& router_name(int router) const { return router_names_[router]; }
    const std::string& port_name(int router, int port) const { return port_names_[router][port]; }
    std::string port_label(int router, int port) const;

    const std::vector<Flow>& flows() const { return flows_; }
    const Flow& flow(std::size_t k) const { return flows_[k]; }
    std::optional<std::size_t> flow_index(std::string_view id) const;

    // Downstream end of the link leaving (router, out_port), if any.
    std::optional<std::pair<int, int>> link_target(int router, int out_port) const;
    bool has_incoming_link(int router, int in_port) const;

    // Input buffer size in bytes at (router, in_port).
    double buffer_at(int router, int in_port) const;

    LinkId out_link(int router, int out_port) const;
    LinkId injection_link(int router, int in_port) const;
    // Links occupied by hop `h` of a flow: its outgoing link, plus the
    // injection link on the first hop.
    std::vector<LinkId> hop_links(const Flow& f, std::size_t h) const;
    std::string link_label(LinkId id) const;

    // Copy with a uniform buffer size and no per-port overrides.
    Network with_buffer(double bytes) const;

private:
    int global_port(int router, int port) const { return port_base_[router] + port; }

    double capacity_ = 0.0;
    double epsilon_ = 0.0;
    double buffer_ = 0.0;
    std::string time_unit_;
    std::vector<std::string> router_names_;
    std::vector<std::vector<std::string>> port_names_;
    std::vector<int> port_base_;
    std::vector<int> global_to_router_;
    std::vector<std::optional<std::pair<int, int>>> link_out_;  // by global port
    std::vector<bool> link_in_;                                 // by global port
    std::map<int, double> buffer_override_;                     // by global port
    std::vector<Flow> flows_;
};

// Token-bucket envelope of a flow at its source: L*(1 + J/T) + (L/T)*t.
ArrivalCurve arrival_curve(const Flow& f);

// --- Per-port partitions ----------------------------------------------------

class PortMaps {
public:
    explicit PortMaps(const Network& net);

    // F_l^p for output port l of router R, keyed by input port p. Flows are
    // listed in declaration order.
    const std::map<int, std::vector<std::size_t>>& aggregates(int router, int out_port) const;
    const std::vector<std::size_t>& aggregate(int router, int out_port, int in_port) const;

    // Flows entering `router` through `in_port`, whatever their output.
    std::vector<std::size_t> sharing_input(int router, int in_port) const;

    // Hop index of flow k at router R; nullopt if k does not cross R.
    std::optional<std::size_t> hop_at(std::size_t k, int router) const;
    int in_port(std::size_t k, int router) const;
    int out_port(std::size_t k, int router) const;

    // Every (router, out_port) with at least one flow.
    std::vector<std::pair<int, int>> busy_outputs() const;

private:
    const Network* net_;
    std::map<std::pair<int, int>, std::map<int, std::vector<std::size_t>>> by_output_;
    std::vector<std::map<int, std::size_t>> hop_index_;
};

// --- Validation -------------------------------------------------------------

enum class ViolationKind { Overload, WeightedShare, Buffer, Cycle };

struct Violation {
    ViolationKind kind;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    bool has(ViolationKind kind) const;
};

// Rate-proportional weight of aggregate F_l^p at output l.
double aggregate_weight(const Network& net, const PortMaps& maps, int router, int out_port, int in_port);

// A flow's burst at hop h+1 depends on its own burst at hop h and on the
// bursts, at the same router, of every flow sharing its input buffer there.
// Returns the (flow, hop) nodes in a dependency-respecting order; throws
// CycleError when the graph is not feed-forward.
std::vector<std::pair<std::size_t, std::size_t>> burst_propagation_order(const Network& net,
                                                                         const PortMaps& maps);

// Flows (by index) lying on a cycle of that graph; empty when feed-forward.
std::vector<std::size_t> burst_dependency_cycle(const Network& net, const PortMaps& maps);

ValidationReport validate(const Network& net);

const char* to_string(ViolationKind kind);

} // namespace whnc
