#pragma once

#include <string>

#include "whnc/model.hpp"

namespace whnc::testing {

inline std::string fixture(const std::string& name)
{
    return std::string(WHNC_FIXTURES) + "/" + name;
}

inline Document fixture_document(const std::string& name)
{
    return load_config(fixture(name));
}

inline Network fixture_network(const std::string& name)
{
    return Network::build(fixture_document(name));
}

// Index helpers for readable assertions.
inline int router_index(const Network& net, const std::string& name)
{
    for (std::size_t r = 0; r < net.router_count(); ++r)
        if (net.router_name(static_cast<int>(r)) == name)
            return static_cast<int>(r);
    return -1;
}

inline int port_index(const Network& net, int router, const std::string& name)
{
    for (std::size_t p = 0; p < net.port_count(router); ++p)
        if (net.port_name(router, static_cast<int>(p)) == name)
            return static_cast<int>(p);
    return -1;
}

inline std::size_t flow_index(const Network& net, const std::string& id)
{
    return *net.flow_index(id);
}

} // namespace whnc::testing

namespace whnc::testing {

// One flow crossing `routers` routers in a line, nothing else on the network.
inline Document chain_document(int routers, double capacity, double epsilon, double buffer, double length,
                               double period)
{
    Document doc;
    doc.network.capacity = capacity;
    doc.network.epsilon = epsilon;
    doc.network.buffer = buffer;
    auto name = [](int i) { return "R" + std::to_string(i); };
    FlowSpec f{"solo", period, period, length, 0.0, {}};
    for (int i = 0; i < routers; ++i) {
        std::string in = i == 0 ? "local" : name(i - 1);
        std::string out = i + 1 == routers ? "local" : name(i + 1);
        doc.network.routers.push_back({name(i), {in, out}});
        if (i + 1 < routers)
            doc.network.links.push_back({name(i), name(i + 1), name(i + 1), name(i)});
        f.path.push_back({name(i), in, out});
    }
    doc.flows.push_back(f);
    return doc;
}

} // namespace whnc::testing
