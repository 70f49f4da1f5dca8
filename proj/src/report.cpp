#include "whnc/report.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "whnc/errors.hpp"

namespace whnc {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json number(double v)
{
    if (!std::isfinite(v))
        return nullptr;
    return v;
}

std::string cell(double v)
{
    if (std::isinf(v))
        return "inf";
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << v;
    return os.str();
}

// Left-aligned columns padded to the widest cell.
std::string table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows)
{
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c)
        width[c] = header[c].size();
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size(); ++c)
            width[c] = std::max(width[c], r[c].size());
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            os << r[c];
            if (c + 1 < r.size())
                os << std::string(width[c] - r[c].size() + 2, ' ');
        }
        os << "\n";
    };
    line(header);
    std::vector<std::string> rule;
    for (std::size_t w : width)
        rule.push_back(std::string(w, '-'));
    line(rule);
    for (const auto& r : rows)
        line(r);
    return os.str();
}

ordered_json segment_json(const Network& net, const Subpath& s)
{
    ordered_json nodes = ordered_json::array();
    const Flow& f = net.flow(s.owner);
    for (std::size_t n = s.first; n <= s.last; ++n)
        nodes.push_back(net.router_name(f.path[n].router));
    return ordered_json{{"owner", f.id}, {"nodes", nodes}};
}

ordered_json id_list(const Network& net, const std::vector<std::size_t>& flows)
{
    ordered_json out = ordered_json::array();
    for (std::size_t k : flows)
        out.push_back(net.flow(k).id);
    return out;
}

} // namespace

Format parse_format(const std::string& text)
{
    if (text == "table")
        return Format::Table;
    if (text == "csv")
        return Format::Csv;
    if (text == "json")
        return Format::Json;
    throw InvalidArgument("unknown format '" + text + "'");
}

std::string format_number(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (std::isnan(v))
        return "nan";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

ordered_json to_json(const FlowResult& r, const Network& net)
{
    ordered_json j;
    j["flow"] = r.id;
    j["d_tr"] = number(r.transit);
    j["d_db"] = number(r.direct);
    j["d_ib"] = number(r.indirect);
    j["d_eed"] = number(r.total);
    j["d_b"] = number(r.blocking());
    j["deadline"] = r.deadline;
    j["verdict"] = to_string(r.verdict);
    ordered_json bursts = ordered_json::array();
    for (double b : r.bursts)
        bursts.push_back(number(b));
    j["bursts"] = bursts;
    ordered_json terms = ordered_json::array();
    for (const auto& t : r.indirect_terms)
        terms.push_back(ordered_json{{"flow", net.flow(t.flow).id},
                                     {"segment", segment_json(net, t.segment)},
                                     {"segment_delay", number(t.segment_delay)},
                                     {"nested", number(t.nested)}});
    j["indirect_terms"] = terms;
    j["recursion_depth"] = r.recursion_depth;
    if (!r.diagnostic.empty())
        j["diagnostic"] = r.diagnostic;
    return j;
}

std::string render_validation(const ValidationReport& report, Format format)
{
    if (format == Format::Json) {
        ordered_json j;
        j["valid"] = report.ok();
        j["violations"] = ordered_json::array();
        for (const auto& v : report.violations)
            j["violations"].push_back(ordered_json{{"kind", to_string(v.kind)}, {"message", v.message}});
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    if (format == Format::Csv) {
        os << "kind,message\n";
        for (const auto& v : report.violations)
            os << to_string(v.kind) << ",\"" << v.message << "\"\n";
        return os.str();
    }
    if (report.ok())
        return "valid\n";
    for (const auto& v : report.violations)
        os << "[" << to_string(v.kind) << "] " << v.message << "\n";
    return os.str();
}

std::string render_results(const Network& net, const std::vector<FlowResult>& results, BlockingMode mode,
                           Format format)
{
    if (format == Format::Json) {
        ordered_json j;
        j["mode"] = to_string(mode);
        j["buffer"] = net.buffer();
        j["time_unit"] = net.time_unit();
        j["flows"] = ordered_json::array();
        for (const auto& r : results)
            j["flows"].push_back(to_json(r, net));
        return j.dump(2) + "\n";
    }
    if (format == Format::Csv) {
        std::ostringstream os;
        os << "flow,d_tr,d_db,d_ib,d_eed,deadline,verdict\n";
        for (const auto& r : results)
            os << r.id << "," << format_number(r.transit) << "," << format_number(r.direct) << ","
               << format_number(r.indirect) << "," << format_number(r.total) << "," << format_number(r.deadline)
               << "," << to_string(r.verdict) << "\n";
        return os.str();
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : results)
        rows.push_back({r.id, cell(r.transit), cell(r.direct), cell(r.indirect), cell(r.total), cell(r.deadline),
                        to_string(r.verdict)});
    std::ostringstream os;
    os << "# mode " << to_string(mode) << ", buffer " << format_number(net.buffer()) << " B, times in "
       << net.time_unit() << "\n";
    os << table({"flow", "D_TR", "D_DB", "D_IB", "D_eed", "deadline", "verdict"}, rows);
    for (const auto& r : results)
        if (!r.diagnostic.empty())
            os << "! " << r.id << ": " << r.diagnostic << "\n";
    return os.str();
}

std::string render_comparison(const Network& net, const std::vector<FlowResult>& aware,
                              const std::vector<FlowResult>& conventional, Format format)
{
    if (format == Format::Json) {
        ordered_json j;
        j["buffer"] = net.buffer();
        j["time_unit"] = net.time_unit();
        j["buffer_aware"] = ordered_json::array();
        j["conventional"] = ordered_json::array();
        j["delta"] = ordered_json::object();
        for (std::size_t k = 0; k < aware.size(); ++k) {
            j["buffer_aware"].push_back(to_json(aware[k], net));
            j["conventional"].push_back(to_json(conventional[k], net));
            j["delta"][aware[k].id] = number(conventional[k].total - aware[k].total);
        }
        return j.dump(2) + "\n";
    }
    if (format == Format::Csv) {
        std::ostringstream os;
        os << "flow,d_eed_buffer_aware,d_eed_conventional,delta,verdict_buffer_aware,verdict_conventional\n";
        for (std::size_t k = 0; k < aware.size(); ++k)
            os << aware[k].id << "," << format_number(aware[k].total) << ","
               << format_number(conventional[k].total) << ","
               << format_number(conventional[k].total - aware[k].total) << "," << to_string(aware[k].verdict)
               << "," << to_string(conventional[k].verdict) << "\n";
        return os.str();
    }
    std::ostringstream os;
    os << render_results(net, aware, BlockingMode::BufferAware, Format::Table) << "\n";
    os << render_results(net, conventional, BlockingMode::Conventional, Format::Table) << "\n";
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < aware.size(); ++k)
        rows.push_back({aware[k].id, cell(aware[k].total), cell(conventional[k].total),
                        cell(conventional[k].total - aware[k].total)});
    os << table({"flow", "D_eed(aware)", "D_eed(conv)", "delta"}, rows);
    return os.str();
}

std::string render_sweep(const std::vector<SweepRow>& rows, bool with_mode, Format format)
{
    if (format == Format::Json) {
        ordered_json j = ordered_json::array();
        for (const auto& r : rows) {
            ordered_json row;
            row["buffer"] = r.buffer;
            if (with_mode)
                row["mode"] = to_string(r.mode);
            row["flow"] = r.flow;
            row["d_eed"] = number(r.total);
            row["verdict"] = to_string(r.verdict);
            j.push_back(row);
        }
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    if (format == Format::Csv) {
        os << (with_mode ? "buffer,mode,flow,d_eed,verdict\n" : "buffer,flow,d_eed,verdict\n");
        for (const auto& r : rows) {
            os << format_number(r.buffer) << ",";
            if (with_mode)
                os << to_string(r.mode) << ",";
            os << r.flow << "," << format_number(r.total) << "," << to_string(r.verdict) << "\n";
        }
        return os.str();
    }
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) {
        std::vector<std::string> c{format_number(r.buffer)};
        if (with_mode)
            c.push_back(to_string(r.mode));
        c.insert(c.end(), {r.flow, cell(r.total), to_string(r.verdict)});
        cells.push_back(std::move(c));
    }
    std::vector<std::string> header{"buffer"};
    if (with_mode)
        header.push_back("mode");
    header.insert(header.end(), {"flow", "D_eed", "verdict"});
    return table(header, cells);
}

std::string render_blocking(const Network& net, const BlockingReport& report)
{
    ordered_json j;
    j["mode"] = to_string(report.mode);
    j["buffer"] = report.buffer;
    j["flows"] = ordered_json::array();
    for (std::size_t k = 0; k < report.flows.size(); ++k) {
        const FlowBlocking& fb = report.flows[k];
        ordered_json f;
        f["flow"] = net.flow(k).id;
        f["direct"] = id_list(net, fb.direct);
        ordered_json mdb = ordered_json::object();
        for (const auto& [l, s] : fb.map_db)
            mdb[net.flow(l).id] = segment_json(net, s)["nodes"];
        f["map_db"] = mdb;
        f["indirect"] = id_list(net, fb.indirect.flows);
        ordered_json mib = ordered_json::object();
        for (const auto& [i, segs] : fb.indirect.candidates) {
            ordered_json options = ordered_json::array();
            for (const auto& s : segs)
                options.push_back(segment_json(net, s));
            mib[net.flow(i).id] = options;
        }
        f["map_ib_candidates"] = mib;
        j["flows"].push_back(f);
    }
    return j.dump(2) + "\n";
}

std::string render_simulation(const SimReport& report, const std::vector<BoundCheck>& checks, Format format)
{
    if (format == Format::Json) {
        ordered_json j;
        j["outcome"] = to_string(report.outcome);
        if (!report.diagnostic.empty())
            j["diagnostic"] = report.diagnostic;
        j["trials"] = report.trials;
        j["tick"] = report.tick;
        j["flows"] = ordered_json::array();
        for (std::size_t k = 0; k < report.flows.size(); ++k) {
            const auto& s = report.flows[k];
            ordered_json f{{"flow", s.id},
                           {"packets", s.packets},
                           {"max_latency", s.max_latency},
                           {"mean_latency", s.mean_latency}};
            if (k < checks.size()) {
                f["bound"] = number(checks[k].bound);
                f["ratio"] = number(checks[k].ratio());
                f["sound"] = checks[k].sound;
            }
            j["flows"].push_back(f);
        }
        j["ports"] = ordered_json::array();
        for (const auto& p : report.ports)
            j["ports"].push_back(ordered_json{{"port", p.port}, {"capacity", p.capacity}, {"max_bytes", p.max_bytes}});
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    if (format == Format::Csv) {
        os << "flow,packets,max_latency,mean_latency,bound,ratio,sound\n";
        for (std::size_t k = 0; k < report.flows.size(); ++k) {
            const auto& s = report.flows[k];
            os << s.id << "," << s.packets << "," << format_number(s.max_latency) << ","
               << format_number(s.mean_latency);
            if (k < checks.size())
                os << "," << format_number(checks[k].bound) << "," << format_number(checks[k].ratio()) << ","
                   << (checks[k].sound ? "yes" : "no");
            else
                os << ",,,";
            os << "\n";
        }
        return os.str();
    }
    os << "# " << to_string(report.outcome) << ", " << report.trials << " trial(s), tick " << format_number(report.tick)
       << "\n";
    if (!report.diagnostic.empty())
        os << "! " << report.diagnostic << "\n";
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < report.flows.size(); ++k) {
        const auto& s = report.flows[k];
        std::vector<std::string> r{s.id, std::to_string(s.packets), cell(s.max_latency), cell(s.mean_latency)};
        if (k < checks.size()) {
            r.push_back(cell(checks[k].bound));
            r.push_back(cell(checks[k].ratio()));
            r.push_back(checks[k].sound ? "ok" : "VIOLATION");
        }
        rows.push_back(std::move(r));
    }
    os << table({"flow", "packets", "max", "mean", "bound", "ratio", "check"}, rows);
    std::vector<std::vector<std::string>> prow;
    for (const auto& p : report.ports)
        prow.push_back({p.port, format_number(p.max_bytes), format_number(p.capacity)});
    os << "\n" << table({"input port", "max occupancy (B)", "buffer (B)"}, prow);
    return os.str();
}

} // namespace whnc
