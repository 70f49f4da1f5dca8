#include "whnc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include "whnc/errors.hpp"

namespace whnc {

namespace {

// splitmix64: small, portable and fully determined by the seed.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next()
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

std::uint64_t mix(std::uint64_t a, std::uint64_t b)
{
    return SplitMix(a ^ (b * 0xd1b54a32d192ed03ULL)).next();
}

constexpr double kSnap = 1e-9;

std::int64_t to_ticks_floor(double value, double tick)
{
    return static_cast<std::int64_t>(std::floor(value / tick + kSnap));
}

std::int64_t to_ticks_ceil(double value, double tick)
{
    return static_cast<std::int64_t>(std::ceil(value / tick - kSnap));
}

struct Packet {
    int flow = 0;
    std::int64_t release = 0;
    int flits = 0;
    std::vector<int> sent;                // per stage: 0 = injection, h + 1 = output of hop h
    std::vector<std::int64_t> header_at;  // per hop: tick the header entered the input buffer
};

struct InputBuffer {
    int capacity = 0;  // flits
    int occupancy = 0;
    int max_occupancy = 0;
    std::deque<int> fifo;  // packets with flits still to leave, oldest first
};

struct OutputPort {
    int router = 0;
    int port = 0;
    int owner = -1;
    std::vector<int> inputs;         // candidate input buffers (global index)
    std::vector<double> weight;      // per candidate
    std::vector<double> current;     // smooth WRR state
};

class Engine {
public:
    Engine(const Network& net, const SimOptions& opt) : net_(net), opt_(opt)
    {
        if (!(opt.flit_size > 0.0))
            throw InvalidArgument("flit size must be > 0");
        if (!(opt.horizon > 0.0))
            throw InvalidArgument("simulation horizon must be > 0");
        tick_ = opt.flit_size / net.capacity();
        // Relay latency of hop h, floored on the cumulative sum so rounding
        // never builds up along a path.
        std::size_t longest = 0;
        for (const Flow& f : net.flows())
            longest = std::max(longest, f.path.size());
        for (std::size_t h = 0; h < longest; ++h) {
            relay_ticks_.push_back(to_ticks_floor(static_cast<double>(h + 1) * net.epsilon(), tick_) -
                                   to_ticks_floor(static_cast<double>(h) * net.epsilon(), tick_));
            max_relay_ = std::max(max_relay_, relay_ticks_.back());
        }

        for (std::size_t r = 0; r < net.router_count(); ++r) {
            port_base_.push_back(static_cast<int>(buffers_.size()));
            for (std::size_t p = 0; p < net.port_count(static_cast<int>(r)); ++p) {
                InputBuffer b;
                double bytes = net.buffer_at(static_cast<int>(r), static_cast<int>(p));
                b.capacity = static_cast<int>(std::floor(bytes / opt.flit_size + kSnap));
                buffers_.push_back(std::move(b));
            }
        }
        used_buffer_.assign(buffers_.size(), false);

        PortMaps maps(net);
        for (auto [router, out] : maps.busy_outputs()) {
            OutputPort o;
            o.router = router;
            o.port = out;
            for (const auto& [in, flows] : maps.aggregates(router, out)) {
                o.inputs.push_back(gport(router, in));
                o.weight.push_back(aggregate_weight(net, maps, router, out, in));
                o.current.push_back(0.0);
            }
            outputs_.push_back(std::move(o));
        }
        for (std::size_t k = 0; k < net.flows().size(); ++k) {
            const Flow& f = net.flow(k);
            for (const Hop& h : f.path) {
                used_buffer_[gport(h.router, h.in_port)] = true;
                if (buffers_[gport(h.router, h.in_port)].capacity < 1)
                    throw InvalidArgument("buffer at " + net.port_label(h.router, h.in_port) +
                                          " holds less than one flit");
            }
            int inj = gport(f.path.front().router, f.path.front().in_port);
            if (std::find(injection_ports_.begin(), injection_ports_.end(), inj) == injection_ports_.end())
                injection_ports_.push_back(inj);
        }
        std::sort(injection_ports_.begin(), injection_ports_.end());
        sources_.resize(buffers_.size());
        source_busy_.assign(buffers_.size(), false);
        output_busy_.assign(outputs_.size(), false);
        stats_.resize(net.flows().size());
        latency_sum_.assign(net.flows().size(), 0.0);
    }

    SimReport run()
    {
        make_releases();
        SimReport report;
        report.tick = tick_;

        std::size_t next_release = 0;
        std::size_t in_system = 0;
        std::int64_t t = 0;
        std::int64_t stalled = 0;
        while (true) {
            while (next_release < release_order_.size() && packets_[release_order_[next_release]].release <= t) {
                int id = release_order_[next_release++];
                const Flow& f = net_.flow(packets_[id].flow);
                sources_[gport(f.path.front().router, f.path.front().in_port)].push_back(id);
                ++in_system;
            }
            if (in_system == 0) {
                if (next_release == release_order_.size())
                    break;
                t = packets_[release_order_[next_release]].release;
                continue;
            }

            std::size_t delivered = 0;
            bool moved = step(t, delivered);
            in_system -= delivered;
            ++report.ticks;
            if (opt_.check_invariants)
                check(t);

            stalled = moved ? 0 : stalled + 1;
            if (stalled > max_relay_ + 2) {
                report.outcome = SimOutcome::Deadlock;
                std::ostringstream os;
                os << "no flit moved for " << stalled << " ticks with " << in_system << " packets in flight at t="
                   << static_cast<double>(t) * tick_;
                report.diagnostic = os.str();
                break;
            }
            ++t;
        }

        report.flits_injected = injected_;
        report.flits_delivered = delivered_;
        for (std::size_t k = 0; k < stats_.size(); ++k) {
            stats_[k].id = net_.flow(k).id;
            if (stats_[k].packets > 0)
                stats_[k].mean_latency = latency_sum_[k] / static_cast<double>(stats_[k].packets);
        }
        report.flows = stats_;
        for (std::size_t r = 0; r < net_.router_count(); ++r)
            for (std::size_t p = 0; p < net_.port_count(static_cast<int>(r)); ++p) {
                int g = gport(static_cast<int>(r), static_cast<int>(p));
                if (!used_buffer_[g])
                    continue;
                report.ports.push_back({net_.port_label(static_cast<int>(r), static_cast<int>(p)),
                                        buffers_[g].capacity * opt_.flit_size,
                                        buffers_[g].max_occupancy * opt_.flit_size});
            }
        return report;
    }

private:
    int gport(int router, int port) const { return port_base_[router] + port; }

    void make_releases()
    {
        SplitMix rng(opt_.seed);
        for (std::size_t k = 0; k < net_.flows().size(); ++k) {
            const Flow& f = net_.flow(k);
            double offset = k < opt_.offsets.size() ? opt_.offsets[k] : 0.0;
            int flits = static_cast<int>(std::ceil(f.length / opt_.flit_size - kSnap));
            for (std::int64_t m = 0;; ++m) {
                double nominal = offset + static_cast<double>(m) * f.period;
                if (nominal >= opt_.horizon)
                    break;
                double jitter = f.jitter > 0.0 ? f.jitter * rng.uniform() : 0.0;
                Packet p;
                p.flow = static_cast<int>(k);
                p.release = to_ticks_ceil(nominal + jitter, tick_);
                p.flits = flits;
                p.sent.assign(f.path.size() + 1, 0);
                p.header_at.assign(f.path.size(), -1);
                packets_.push_back(std::move(p));
            }
        }
        release_order_.resize(packets_.size());
        for (std::size_t i = 0; i < packets_.size(); ++i)
            release_order_[i] = static_cast<int>(i);
        std::stable_sort(release_order_.begin(), release_order_.end(),
                         [&](int a, int b) { return packets_[a].release < packets_[b].release; });
    }

    // Moves flits until nothing else can move within tick t.
    bool step(std::int64_t t, std::size_t& delivered)
    {
        std::fill(source_busy_.begin(), source_busy_.end(), false);
        std::fill(output_busy_.begin(), output_busy_.end(), false);
        bool any = false;
        bool changed = true;
        while (changed) {
            changed = false;
            for (int q : injection_ports_)
                changed |= inject(q, t);
            for (std::size_t o = 0; o < outputs_.size(); ++o)
                changed |= forward(static_cast<int>(o), t, delivered);
            any |= changed;
        }
        return any;
    }

    bool inject(int q, std::int64_t t)
    {
        if (source_busy_[q] || sources_[q].empty())
            return false;
        int id = sources_[q].front();
        Packet& p = packets_[id];
        InputBuffer& b = buffers_[q];
        if (b.occupancy >= b.capacity)
            return false;
        if (p.sent[0] == 0) {
            b.fifo.push_back(id);
            p.header_at[0] = t;
        }
        ++p.sent[0];
        ++b.occupancy;
        b.max_occupancy = std::max(b.max_occupancy, b.occupancy);
        ++injected_;
        if (p.sent[0] == p.flits)
            sources_[q].pop_front();
        source_busy_[q] = true;
        return true;
    }

    int hop_of(const Packet& p, int router) const
    {
        const auto& path = net_.flow(p.flow).path;
        for (std::size_t h = 0; h < path.size(); ++h)
            if (path[h].router == router)
                return static_cast<int>(h);
        return -1;
    }

    void arbitrate(OutputPort& o, std::int64_t t)
    {
        double total = 0.0;
        int best = -1;
        for (std::size_t c = 0; c < o.inputs.size(); ++c) {
            InputBuffer& b = buffers_[o.inputs[c]];
            if (b.fifo.empty())
                continue;
            const Packet& p = packets_[b.fifo.front()];
            int h = hop_of(p, o.router);
            const Hop& hop = net_.flow(p.flow).path[h];
            if (hop.out_port != o.port || p.header_at[h] < 0 || t < p.header_at[h] + relay_ticks_[h])
                continue;
            o.current[c] += o.weight[c];
            total += o.weight[c];
            if (best < 0 || o.current[c] > o.current[best])
                best = static_cast<int>(c);
        }
        if (best < 0)
            return;
        o.current[best] -= total;
        o.owner = buffers_[o.inputs[best]].fifo.front();
    }

    bool forward(int index, std::int64_t t, std::size_t& delivered)
    {
        if (output_busy_[index])
            return false;
        OutputPort& o = outputs_[index];
        if (o.owner < 0)
            arbitrate(o, t);
        if (o.owner < 0)
            return false;

        Packet& p = packets_[o.owner];
        const auto& path = net_.flow(p.flow).path;
        int h = hop_of(p, o.router);
        if (p.sent[h] - p.sent[h + 1] <= 0)
            return false;
        bool last_hop = h + 1 == static_cast<int>(path.size());
        InputBuffer* down = nullptr;
        if (!last_hop) {
            down = &buffers_[gport(path[h + 1].router, path[h + 1].in_port)];
            if (down->occupancy >= down->capacity)
                return false;
        }

        InputBuffer& up = buffers_[gport(path[h].router, path[h].in_port)];
        ++p.sent[h + 1];
        --up.occupancy;
        if (down) {
            if (p.sent[h + 1] == 1) {
                down->fifo.push_back(o.owner);
                p.header_at[h + 1] = t;
            }
            ++down->occupancy;
            down->max_occupancy = std::max(down->max_occupancy, down->occupancy);
        } else {
            ++delivered_;
        }
        if (p.sent[h + 1] == p.flits) {
            up.fifo.pop_front();
            if (last_hop) {
                record(p, t + 1);
                ++delivered;
            }
            o.owner = -1;
        }
        output_busy_[index] = true;
        return true;
    }

    void record(const Packet& p, std::int64_t done)
    {
        double latency = static_cast<double>(done - p.release) * tick_;
        FlowSimStats& s = stats_[p.flow];
        ++s.packets;
        s.max_latency = std::max(s.max_latency, latency);
        latency_sum_[p.flow] += latency;
    }

    void check(std::int64_t t) const
    {
        std::uint64_t held = 0;
        for (const auto& b : buffers_) {
            if (b.occupancy < 0 || b.occupancy > b.capacity)
                throw Error("credit violation at tick " + std::to_string(t));
            held += static_cast<std::uint64_t>(b.occupancy);
        }
        if (injected_ != delivered_ + held)
            throw Error("flit conservation violated at tick " + std::to_string(t));
        for (const auto& p : packets_)
            for (std::size_t s = 1; s < p.sent.size(); ++s)
                if (p.sent[s] > p.sent[s - 1])
                    throw Error("flit order violated at tick " + std::to_string(t));
    }

    const Network& net_;
    const SimOptions& opt_;
    double tick_ = 0.0;
    std::vector<std::int64_t> relay_ticks_;
    std::int64_t max_relay_ = 0;
    std::vector<int> port_base_;
    std::vector<InputBuffer> buffers_;
    std::vector<bool> used_buffer_;
    std::vector<OutputPort> outputs_;
    std::vector<int> injection_ports_;
    std::vector<std::deque<int>> sources_;
    std::vector<bool> source_busy_;
    std::vector<bool> output_busy_;
    std::vector<Packet> packets_;
    std::vector<int> release_order_;
    std::vector<FlowSimStats> stats_;
    std::vector<double> latency_sum_;
    std::uint64_t injected_ = 0;
    std::uint64_t delivered_ = 0;
};

void merge(SimReport& into, const SimReport& other)
{
    if (other.outcome == SimOutcome::Deadlock && into.outcome != SimOutcome::Deadlock) {
        into.outcome = SimOutcome::Deadlock;
        into.diagnostic = other.diagnostic;
    }
    into.ticks += other.ticks;
    into.flits_injected += other.flits_injected;
    into.flits_delivered += other.flits_delivered;
    into.trials += other.trials;
    for (std::size_t k = 0; k < into.flows.size(); ++k) {
        FlowSimStats& a = into.flows[k];
        const FlowSimStats& b = other.flows[k];
        std::size_t n = a.packets + b.packets;
        if (n > 0)
            a.mean_latency = (a.mean_latency * static_cast<double>(a.packets) +
                              b.mean_latency * static_cast<double>(b.packets)) /
                             static_cast<double>(n);
        a.packets = n;
        a.max_latency = std::max(a.max_latency, b.max_latency);
    }
    for (std::size_t i = 0; i < into.ports.size(); ++i)
        into.ports[i].max_bytes = std::max(into.ports[i].max_bytes, other.ports[i].max_bytes);
}

} // namespace

const char* to_string(SimOutcome o)
{
    return o == SimOutcome::Completed ? "completed" : "deadlock";
}

SimOptions sim_options(const Network& net, const SimSpec& spec)
{
    SimOptions opt;
    opt.horizon = spec.horizon;
    opt.seed = spec.seed;
    opt.flit_size = spec.flit_size;
    opt.offsets.assign(net.flows().size(), 0.0);
    for (const auto& [id, value] : spec.offsets) {
        auto k = net.flow_index(id);
        if (!k)
            throw InvalidArgument("offset given for unknown flow '" + id + "'");
        if (!(value >= 0.0))
            throw InvalidArgument("offset of flow '" + id + "' must be >= 0");
        opt.offsets[*k] = value;
    }
    return opt;
}

SimReport simulate(const Network& net, const SimOptions& options)
{
    for (double off : options.offsets)
        if (!(off >= 0.0))
            throw InvalidArgument("release offsets must be >= 0");
    return Engine(net, options).run();
}

SimReport sweep_offsets(const Network& net, const SimOptions& options, std::size_t trials, std::uint64_t seed)
{
    if (trials < 1)
        throw InvalidArgument("sweep_offsets needs at least one trial");

    auto trial_options = [&](std::size_t t) {
        SimOptions o = options;
        if (t == 0)
            return o;
        SplitMix rng(mix(seed, t));
        o.offsets.assign(net.flows().size(), 0.0);
        for (std::size_t k = 0; k < net.flows().size(); ++k)
            o.offsets[k] = rng.uniform() * net.flow(k).period;
        o.seed = rng.next();
        return o;
    };

    std::vector<SimReport> reports(trials);
    std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), trials));
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t t = w; t < trials; t += workers)
                reports[t] = simulate(net, trial_options(t));
        }));
    for (auto& j : jobs)
        j.get();

    SimReport total = std::move(reports[0]);
    for (std::size_t t = 1; t < trials; ++t)
        merge(total, reports[t]);
    return total;
}

} // namespace whnc
