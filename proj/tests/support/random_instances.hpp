// Random feed-forward instances: routers are numbered and every path visits
// them in increasing order, so burst dependencies can never close a cycle.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>

#include "whnc/model.hpp"

namespace whnc::testing {

struct RandomOptions {
    int max_routers = 12;
    int max_flows = 8;
    int max_hops = 5;
    double capacity = 1.0;         // one byte per time unit, so a 1-byte flit is one tick
    int max_epsilon = 3;           // whole ticks
    double max_utilization = 0.6;  // per output port
    double buffer = 16.0;
    bool jitter = true;
};

inline Document random_document(std::uint64_t seed, const RandomOptions& o = {})
{
    std::mt19937_64 rng(seed);
    auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

    int n_routers = uniform(3, o.max_routers);
    int n_flows = uniform(2, o.max_flows);
    auto name = [](int r) { return "R" + std::to_string(r); };

    Document doc;
    doc.network.capacity = o.capacity;
    doc.network.epsilon = uniform(0, o.max_epsilon) / o.capacity;
    doc.network.buffer = o.buffer;

    std::set<std::pair<int, int>> links;
    for (int k = 0; k < n_flows; ++k) {
        FlowSpec f;
        f.id = "f" + std::to_string(k + 1);
        f.length = uniform(8, 64);
        f.period = uniform(200, 1000);
        f.deadline = f.period;
        if (o.jitter && uniform(0, 2) == 0)
            f.jitter = uniform(0, static_cast<int>(f.period / 2));
        // Short forward strides keep paths overlapping.
        int hops = uniform(1, o.max_hops);
        std::vector<int> routers{uniform(0, n_routers - 1)};
        while (static_cast<int>(routers.size()) < hops) {
            int next = routers.back() + uniform(1, 2);
            if (next >= n_routers)
                break;
            routers.push_back(next);
        }
        for (std::size_t h = 0; h < routers.size(); ++h) {
            std::string in = h == 0 ? "local" : name(routers[h - 1]);
            std::string out = h + 1 == routers.size() ? "local" : name(routers[h + 1]);
            f.path.push_back({name(routers[h]), in, out});
            if (h + 1 < routers.size())
                links.insert({routers[h], routers[h + 1]});
        }
        doc.flows.push_back(std::move(f));
    }

    std::vector<std::set<std::string>> ports(n_routers);
    for (int r = 0; r < n_routers; ++r)
        ports[r].insert("local");
    for (auto [a, b] : links) {
        ports[a].insert(name(b));
        ports[b].insert(name(a));
        doc.network.links.push_back({name(a), name(b), name(b), name(a)});
    }
    for (int r = 0; r < n_routers; ++r)
        doc.network.routers.push_back({name(r), {ports[r].begin(), ports[r].end()}});

    // Stretch every period by the worst output load so no port exceeds the
    // target utilization.
    std::map<std::pair<std::string, std::string>, double> load;
    for (const FlowSpec& f : doc.flows)
        for (const HopSpec& h : f.path)
            load[{h.router, h.out_port}] += f.length / f.period;
    double worst = 0.0;
    for (const auto& [port, rate] : load)
        worst = std::max(worst, rate);
    double stretch = std::max(1.0, worst / (o.max_utilization * o.capacity));
    for (FlowSpec& f : doc.flows) {
        f.period = std::ceil(f.period * stretch);
        f.deadline = f.period;
        f.jitter = std::floor(f.jitter * stretch);
    }
    return doc;
}

} // namespace whnc::testing
