#include "whnc/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "whnc/errors.hpp"

namespace whnc {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what)
{
    throw ParseError(where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where)
{
    if (!obj.is_object())
        fail(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        fail(where, std::string("missing key '") + key + "'");
    return *it;
}

double read_number(const json& obj, const char* key, const std::string& where)
{
    const json& v = require(obj, key, where);
    if (!v.is_number())
        fail(where + "." + key, "expected a decimal number");
    double d = v.get<double>();
    if (!std::isfinite(d))
        fail(where + "." + key, "number is not finite");
    return d;
}

double read_number_or(const json& obj, const char* key, const std::string& where, double fallback)
{
    return obj.contains(key) ? read_number(obj, key, where) : fallback;
}

std::string read_string(const json& obj, const char* key, const std::string& where)
{
    const json& v = require(obj, key, where);
    if (!v.is_string())
        fail(where + "." + key, "expected a string");
    return v.get<std::string>();
}

const json& read_array(const json& obj, const char* key, const std::string& where)
{
    const json& v = require(obj, key, where);
    if (!v.is_array())
        fail(where + "." + key, "expected an array");
    return v;
}

std::string at(const std::string& base, std::size_t i)
{
    return base + "[" + std::to_string(i) + "]";
}

} // namespace

Document parse_config(std::string_view text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("$: malformed JSON: ") + e.what());
    }
    if (!root.is_object())
        fail("$", "expected an object");
    if (root.contains("schema")) {
        const json& s = root["schema"];
        if (!s.is_number_integer() || s.get<int>() != kSchemaVersion)
            fail("$.schema", "unsupported schema version (expected 1)");
    }

    Document doc;
    const json& net = require(root, "network", "$");
    const std::string np = "$.network";
    doc.network.capacity = read_number(net, "capacity", np);
    doc.network.epsilon = read_number(net, "epsilon", np);
    doc.network.buffer = read_number(net, "buffer", np);
    if (net.contains("time_unit"))
        doc.network.time_unit = read_string(net, "time_unit", np);

    const json& routers = read_array(net, "routers", np);
    for (std::size_t i = 0; i < routers.size(); ++i) {
        std::string rp = at(np + ".routers", i);
        RouterSpec r;
        r.id = read_string(routers[i], "id", rp);
        const json& ports = read_array(routers[i], "ports", rp);
        for (std::size_t j = 0; j < ports.size(); ++j) {
            if (!ports[j].is_string())
                fail(at(rp + ".ports", j), "expected a string");
            r.ports.push_back(ports[j].get<std::string>());
        }
        doc.network.routers.push_back(std::move(r));
    }
    const json& links = read_array(net, "links", np);
    for (std::size_t i = 0; i < links.size(); ++i) {
        std::string lp = at(np + ".links", i);
        doc.network.links.push_back({read_string(links[i], "from", lp), read_string(links[i], "from_port", lp),
                                     read_string(links[i], "to", lp), read_string(links[i], "to_port", lp)});
    }
    if (net.contains("buffer_overrides")) {
        const json& ov = read_array(net, "buffer_overrides", np);
        for (std::size_t i = 0; i < ov.size(); ++i) {
            std::string op = at(np + ".buffer_overrides", i);
            doc.network.buffer_overrides.push_back(
                {read_string(ov[i], "router", op), read_string(ov[i], "port", op), read_number(ov[i], "buffer", op)});
        }
    }

    const json& flows = read_array(root, "flows", "$");
    for (std::size_t i = 0; i < flows.size(); ++i) {
        std::string fp = at("$.flows", i);
        const json& f = flows[i];
        FlowSpec spec;
        spec.id = read_string(f, "id", fp);
        spec.period = read_number(f, "period", fp);
        spec.deadline = read_number(f, "deadline", fp);
        spec.length = read_number(f, "length", fp);
        spec.jitter = read_number_or(f, "jitter", fp, 0.0);
        const json& path = read_array(f, "path", fp);
        for (std::size_t h = 0; h < path.size(); ++h) {
            std::string hp = at(fp + ".path", h);
            spec.path.push_back({read_string(path[h], "router", hp), read_string(path[h], "in_port", hp),
                                 read_string(path[h], "out_port", hp)});
        }
        doc.flows.push_back(std::move(spec));
    }

    if (root.contains("sim")) {
        const json& s = root["sim"];
        const std::string sp = "$.sim";
        if (!s.is_object())
            fail(sp, "expected an object");
        SimSpec sim;
        sim.horizon = read_number(s, "horizon", sp);
        if (s.contains("trials")) {
            if (!s["trials"].is_number_integer())
                fail(sp + ".trials", "expected an integer");
            sim.trials = s["trials"].get<int>();
        }
        if (s.contains("seed")) {
            if (!s["seed"].is_number_unsigned())
                fail(sp + ".seed", "expected a non-negative integer");
            sim.seed = s["seed"].get<std::uint64_t>();
        }
        sim.flit_size = read_number_or(s, "flit_size", sp, 1.0);
        if (s.contains("offsets")) {
            const json& off = s["offsets"];
            if (!off.is_object())
                fail(sp + ".offsets", "expected an object keyed by flow id");
            for (auto it = off.begin(); it != off.end(); ++it) {
                if (!it.value().is_number())
                    fail(sp + ".offsets." + it.key(), "expected a decimal number");
                bool known = std::any_of(doc.flows.begin(), doc.flows.end(),
                                         [&](const FlowSpec& f) { return f.id == it.key(); });
                if (!known)
                    fail(sp + ".offsets." + it.key(), "unknown flow");
                sim.offsets[it.key()] = it.value().get<double>();
            }
        }
        doc.sim = std::move(sim);
    }
    return doc;
}

Document load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError(path + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const Document& doc)
{
    ordered_json root;
    root["schema"] = kSchemaVersion;
    ordered_json net;
    net["capacity"] = doc.network.capacity;
    net["epsilon"] = doc.network.epsilon;
    net["buffer"] = doc.network.buffer;
    net["time_unit"] = doc.network.time_unit;
    net["routers"] = ordered_json::array();
    for (const auto& r : doc.network.routers)
        net["routers"].push_back(ordered_json{{"id", r.id}, {"ports", r.ports}});
    net["links"] = ordered_json::array();
    for (const auto& l : doc.network.links)
        net["links"].push_back(
            ordered_json{{"from", l.from}, {"from_port", l.from_port}, {"to", l.to}, {"to_port", l.to_port}});
    if (!doc.network.buffer_overrides.empty()) {
        net["buffer_overrides"] = ordered_json::array();
        for (const auto& o : doc.network.buffer_overrides)
            net["buffer_overrides"].push_back(ordered_json{{"router", o.router}, {"port", o.port}, {"buffer", o.bytes}});
    }
    root["network"] = std::move(net);
    root["flows"] = ordered_json::array();
    for (const auto& f : doc.flows) {
        ordered_json jf;
        jf["id"] = f.id;
        jf["period"] = f.period;
        jf["deadline"] = f.deadline;
        jf["length"] = f.length;
        jf["jitter"] = f.jitter;
        jf["path"] = ordered_json::array();
        for (const auto& h : f.path)
            jf["path"].push_back(ordered_json{{"router", h.router}, {"in_port", h.in_port}, {"out_port", h.out_port}});
        root["flows"].push_back(std::move(jf));
    }
    if (doc.sim) {
        ordered_json s;
        s["horizon"] = doc.sim->horizon;
        s["trials"] = doc.sim->trials;
        s["seed"] = doc.sim->seed;
        s["flit_size"] = doc.sim->flit_size;
        if (!doc.sim->offsets.empty()) {
            ordered_json off = ordered_json::object();
            for (const auto& [id, v] : doc.sim->offsets)
                off[id] = v;
            s["offsets"] = std::move(off);
        }
        root["sim"] = std::move(s);
    }
    return root.dump(2) + "\n";
}

// --- Network ----------------------------------------------------------------

Network Network::build(const Document& doc)
{
    const NetworkSpec& spec = doc.network;
    Network net;
    if (!(spec.capacity > 0.0))
        fail("$.network.capacity", "must be > 0");
    if (!(spec.epsilon >= 0.0))
        fail("$.network.epsilon", "must be >= 0");
    net.capacity_ = spec.capacity;
    net.epsilon_ = spec.epsilon;
    net.buffer_ = spec.buffer;
    net.time_unit_ = spec.time_unit;

    std::map<std::string, int> router_index;
    int base = 0;
    for (std::size_t i = 0; i < spec.routers.size(); ++i) {
        const RouterSpec& r = spec.routers[i];
        std::string rp = at("$.network.routers", i);
        if (r.id.empty())
            fail(rp + ".id", "empty router id");
        if (!router_index.emplace(r.id, static_cast<int>(i)).second)
            fail(rp + ".id", "duplicate router '" + r.id + "'");
        std::set<std::string> seen;
        for (std::size_t j = 0; j < r.ports.size(); ++j)
            if (!seen.insert(r.ports[j]).second)
                fail(at(rp + ".ports", j), "duplicate port '" + r.ports[j] + "'");
        net.router_names_.push_back(r.id);
        net.port_names_.push_back(r.ports);
        net.port_base_.push_back(base);
        for (std::size_t j = 0; j < r.ports.size(); ++j)
            net.global_to_router_.push_back(static_cast<int>(i));
        base += static_cast<int>(r.ports.size());
    }
    net.link_out_.assign(base, std::nullopt);
    net.link_in_.assign(base, false);

    auto find_router = [&](const std::string& id, const std::string& where) {
        auto it = router_index.find(id);
        if (it == router_index.end())
            fail(where, "unknown router '" + id + "'");
        return it->second;
    };
    auto find_port = [&](int router, const std::string& port, const std::string& where) {
        const auto& ports = net.port_names_[router];
        auto it = std::find(ports.begin(), ports.end(), port);
        if (it == ports.end())
            fail(where, "unknown port '" + port + "' on router '" + net.router_names_[router] + "'");
        return static_cast<int>(it - ports.begin());
    };

    for (std::size_t i = 0; i < spec.links.size(); ++i) {
        const LinkSpec& l = spec.links[i];
        std::string lp = at("$.network.links", i);
        int from = find_router(l.from, lp + ".from");
        int from_port = find_port(from, l.from_port, lp + ".from_port");
        int to = find_router(l.to, lp + ".to");
        int to_port = find_port(to, l.to_port, lp + ".to_port");
        int gout = net.global_port(from, from_port);
        int gin = net.global_port(to, to_port);
        if (net.link_out_[gout])
            fail(lp, "second link leaving " + l.from + ":" + l.from_port);
        if (net.link_in_[gin])
            fail(lp, "second link entering " + l.to + ":" + l.to_port);
        net.link_out_[gout] = std::make_pair(to, to_port);
        net.link_in_[gin] = true;
    }

    for (std::size_t i = 0; i < spec.buffer_overrides.size(); ++i) {
        const BufferOverride& o = spec.buffer_overrides[i];
        std::string op = at("$.network.buffer_overrides", i);
        int r = find_router(o.router, op + ".router");
        int p = find_port(r, o.port, op + ".port");
        net.buffer_override_[net.global_port(r, p)] = o.bytes;
    }

    std::set<std::string> flow_ids;
    for (std::size_t i = 0; i < doc.flows.size(); ++i) {
        const FlowSpec& fs = doc.flows[i];
        std::string fp = at("$.flows", i);
        if (fs.id.empty())
            fail(fp + ".id", "empty flow id");
        if (!flow_ids.insert(fs.id).second)
            fail(fp + ".id", "duplicate flow id '" + fs.id + "'");
        if (!(fs.period > 0.0))
            fail(fp + ".period", "must be > 0");
        if (!(fs.deadline > 0.0))
            fail(fp + ".deadline", "must be > 0");
        if (!(fs.length >= 1.0))
            fail(fp + ".length", "must be >= 1 byte");
        if (!(fs.jitter >= 0.0))
            fail(fp + ".jitter", "must be >= 0");
        if (fs.path.empty())
            fail(fp + ".path", "empty path");

        Flow f{fs.id, fs.period, fs.deadline, fs.length, fs.jitter, {}};
        std::set<int> visited;
        for (std::size_t h = 0; h < fs.path.size(); ++h) {
            std::string hp = at(fp + ".path", h);
            Hop hop;
            hop.router = find_router(fs.path[h].router, hp + ".router");
            hop.in_port = find_port(hop.router, fs.path[h].in_port, hp + ".in_port");
            hop.out_port = find_port(hop.router, fs.path[h].out_port, hp + ".out_port");
            if (!visited.insert(hop.router).second)
                fail(hp, "router '" + fs.path[h].router + "' visited twice");
            if (h == 0 && net.link_in_[net.global_port(hop.router, hop.in_port)])
                fail(hp + ".in_port", "first hop must enter through an injection port, not a link");
            if (h > 0) {
                const Hop& prev = f.path.back();
                auto target = net.link_out_[net.global_port(prev.router, prev.out_port)];
                if (!target || target->first != hop.router || target->second != hop.in_port)
                    fail(hp, "unconnected hop (" + fs.path[h - 1].router + ":" + fs.path[h - 1].out_port + " -> " +
                                 fs.path[h].router + ":" + fs.path[h].in_port + ")");
            }
            if (h + 1 == fs.path.size() && net.link_out_[net.global_port(hop.router, hop.out_port)])
                fail(hp + ".out_port", "last hop must leave through an ejection port, not a link");
            f.path.push_back(hop);
        }
        net.flows_.push_back(std::move(f));
    }
    return net;
}

std::string Network::port_label(int router, int port) const
{
    return router_names_[router] + ":" + port_names_[router][port];
}

std::optional<std::size_t> Network::flow_index(std::string_view id) const
{
    for (std::size_t k = 0; k < flows_.size(); ++k)
        if (flows_[k].id == id)
            return k;
    return std::nullopt;
}

std::optional<std::pair<int, int>> Network::link_target(int router, int out_port) const
{
    return link_out_[global_port(router, out_port)];
}

bool Network::has_incoming_link(int router, int in_port) const
{
    return link_in_[global_port(router, in_port)];
}

double Network::buffer_at(int router, int in_port) const
{
    auto it = buffer_override_.find(global_port(router, in_port));
    return it == buffer_override_.end() ? buffer_ : it->second;
}

LinkId Network::out_link(int router, int out_port) const
{
    return 2 * global_port(router, out_port);
}

LinkId Network::injection_link(int router, int in_port) const
{
    return 2 * global_port(router, in_port) + 1;
}

std::vector<LinkId> Network::hop_links(const Flow& f, std::size_t h) const
{
    const Hop& hop = f.path[h];
    if (h == 0)
        return {injection_link(hop.router, hop.in_port), out_link(hop.router, hop.out_port)};
    return {out_link(hop.router, hop.out_port)};
}

std::string Network::link_label(LinkId id) const
{
    int g = id / 2;
    int r = global_to_router_[g];
    int p = g - port_base_[r];
    if (id % 2 == 1)
        return "inject>" + port_label(r, p);
    auto target = link_out_[g];
    if (!target)
        return port_label(r, p) + ">eject";
    return port_label(r, p) + ">" + port_label(target->first, target->second);
}

Network Network::with_buffer(double bytes) const
{
    Network copy = *this;
    copy.buffer_ = bytes;
    copy.buffer_override_.clear();
    return copy;
}

ArrivalCurve arrival_curve(const Flow& f)
{
    double rate = f.length / f.period;
    return {f.length + rate * f.jitter, rate};
}

// --- PortMaps ---------------------------------------------------------------

PortMaps::PortMaps(const Network& net) : net_(&net), hop_index_(net.flows().size())
{
    for (std::size_t k = 0; k < net.flows().size(); ++k) {
        const Flow& f = net.flow(k);
        for (std::size_t h = 0; h < f.path.size(); ++h) {
            const Hop& hop = f.path[h];
            by_output_[{hop.router, hop.out_port}][hop.in_port].push_back(k);
            hop_index_[k][hop.router] = h;
        }
    }
}

const std::map<int, std::vector<std::size_t>>& PortMaps::aggregates(int router, int out_port) const
{
    static const std::map<int, std::vector<std::size_t>> empty;
    auto it = by_output_.find({router, out_port});
    return it == by_output_.end() ? empty : it->second;
}

const std::vector<std::size_t>& PortMaps::aggregate(int router, int out_port, int in_port) const
{
    static const std::vector<std::size_t> empty;
    const auto& aggs = aggregates(router, out_port);
    auto it = aggs.find(in_port);
    return it == aggs.end() ? empty : it->second;
}

std::vector<std::size_t> PortMaps::sharing_input(int router, int in_port) const
{
    std::vector<std::size_t> out;
    for (const auto& [key, aggs] : by_output_) {
        if (key.first != router)
            continue;
        auto it = aggs.find(in_port);
        if (it != aggs.end())
            out.insert(out.end(), it->second.begin(), it->second.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<std::size_t> PortMaps::hop_at(std::size_t k, int router) const
{
    auto it = hop_index_[k].find(router);
    if (it == hop_index_[k].end())
        return std::nullopt;
    return it->second;
}

int PortMaps::in_port(std::size_t k, int router) const
{
    auto h = hop_at(k, router);
    if (!h)
        throw DomainError("flow '" + net_->flow(k).id + "' does not cross router '" + net_->router_name(router) + "'");
    return net_->flow(k).path[*h].in_port;
}

int PortMaps::out_port(std::size_t k, int router) const
{
    auto h = hop_at(k, router);
    if (!h)
        throw DomainError("flow '" + net_->flow(k).id + "' does not cross router '" + net_->router_name(router) + "'");
    return net_->flow(k).path[*h].out_port;
}

std::vector<std::pair<int, int>> PortMaps::busy_outputs() const
{
    std::vector<std::pair<int, int>> out;
    for (const auto& [key, aggs] : by_output_)
        out.push_back(key);
    return out;
}

} // namespace whnc
