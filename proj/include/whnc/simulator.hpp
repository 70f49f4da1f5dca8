// simulator.hpp - Flit-level wormhole simulator used to cross-check bounds.
//
// Time advances in ticks of one flit transmission (flit_size / C). Every
// router input port owns a FIFO buffer with byte credits; output ports are
// held by one packet from header to tail and are arbitrated between input
// ports by smooth weighted round-robin with the rate-proportional weights of
// the analysis. A header waits the relay latency at each router before it
// may request its output. Credits return within the tick they are freed and
// a flit may cross several idle stages in one tick, so the model is never
// more pessimistic than the physical pipeline.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "whnc/model.hpp"

namespace whnc {

struct SimOptions {
    double horizon = 0.0;          // packets are released at nominal times < horizon
    std::uint64_t seed = 1;        // jitter realizations
    double flit_size = 1.0;        // bytes
    std::vector<double> offsets;   // per flow, time units; empty means all zero
    bool check_invariants = false; // verify conservation and credits every tick
};

// Resolves the `sim` section of a document against a compiled network.
SimOptions sim_options(const Network& net, const SimSpec& spec);

enum class SimOutcome { Completed, Deadlock };

const char* to_string(SimOutcome o);

struct FlowSimStats {
    std::string id;
    std::size_t packets = 0;
    double max_latency = 0.0;
    double mean_latency = 0.0;
};

struct PortOccupancy {
    std::string port;
    double capacity = 0.0;   // bytes
    double max_bytes = 0.0;
};

struct SimReport {
    SimOutcome outcome = SimOutcome::Completed;
    std::string diagnostic;
    double tick = 0.0;
    std::int64_t ticks = 0;                 // simulated (non-idle) ticks
    std::uint64_t flits_injected = 0;
    std::uint64_t flits_delivered = 0;
    std::size_t trials = 1;
    std::vector<FlowSimStats> flows;
    std::vector<PortOccupancy> ports;       // every input port with traffic
};

SimReport simulate(const Network& net, const SimOptions& options);

// Trial 0 is simulate(options); each further trial draws fresh release
// offsets in [0, T) and jitter from `seed`. Per-flow maxima over all trials.
SimReport sweep_offsets(const Network& net, const SimOptions& options, std::size_t trials, std::uint64_t seed);

} // namespace whnc
