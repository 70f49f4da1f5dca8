#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "whnc/analysis.hpp"
#include "whnc/blocking.hpp"
#include "whnc/cli.hpp"
#include "whnc/errors.hpp"
#include "whnc/minplus.hpp"
#include "whnc/model.hpp"
#include "whnc/report.hpp"
#include "whnc/simulator.hpp"

namespace py = pybind11;
using namespace whnc;

namespace {

BlockingMode mode_of(const std::string& name)
{
    return name == "aware" ? BlockingMode::BufferAware : parse_blocking_mode(name);
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Buffer-aware worst-case delay analysis for wormhole networks-on-chip";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<InstabilityError>(m, "InstabilityError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<CycleError>(m, "CycleError", base.ptr());

    py::class_<ArrivalCurve>(m, "ArrivalCurve")
        .def(py::init<double, double>(), py::arg("burst"), py::arg("rate"))
        .def_readonly("burst", &ArrivalCurve::burst)
        .def_readonly("rate", &ArrivalCurve::rate)
        .def("__call__", &ArrivalCurve::operator())
        .def("__repr__", [](const ArrivalCurve& a) {
            return "ArrivalCurve(" + format_number(a.burst) + ", " + format_number(a.rate) + ")";
        });
    py::class_<ServiceCurve>(m, "ServiceCurve")
        .def(py::init<double, double>(), py::arg("rate"), py::arg("latency"))
        .def_readonly("rate", &ServiceCurve::rate)
        .def_readonly("latency", &ServiceCurve::latency)
        .def("__call__", &ServiceCurve::operator())
        .def("__repr__", [](const ServiceCurve& s) {
            return "ServiceCurve(" + format_number(s.rate) + ", " + format_number(s.latency) + ")";
        });
    m.def("convolve", &convolve);
    m.def("delay_shift", &delay_shift);
    m.def("deconvolve", &deconvolve);
    m.def("residual_blind", &residual_blind);
    m.def("hdev", &hdev);
    m.def("vdev", &vdev);
    m.def("hops", &hops, py::arg("length"), py::arg("buffer"));

    py::class_<Network>(m, "Network")
        .def_static("load", [](const std::string& path) { return Network::build(load_config(path)); })
        .def_static("from_json", [](const std::string& text) { return Network::build(parse_config(text)); })
        .def_property_readonly("capacity", &Network::capacity)
        .def_property_readonly("epsilon", &Network::epsilon)
        .def_property_readonly("buffer", &Network::buffer)
        .def_property_readonly("time_unit", &Network::time_unit)
        .def_property_readonly("router_count", &Network::router_count)
        .def_property_readonly("flow_ids", [](const Network& n) {
            std::vector<std::string> ids;
            for (const Flow& f : n.flows())
                ids.push_back(f.id);
            return ids;
        })
        .def("with_buffer", &Network::with_buffer, py::arg("bytes"));

    m.def("validate", [](const Network& net) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const Violation& v : validate(net).violations)
            out.emplace_back(to_string(v.kind), v.message);
        return out;
    });

    py::class_<FlowResult>(m, "FlowResult")
        .def_readonly("id", &FlowResult::id)
        .def_readonly("transit", &FlowResult::transit)
        .def_readonly("direct", &FlowResult::direct)
        .def_readonly("indirect", &FlowResult::indirect)
        .def_readonly("total", &FlowResult::total)
        .def_readonly("deadline", &FlowResult::deadline)
        .def_readonly("recursion_depth", &FlowResult::recursion_depth)
        .def_readonly("diagnostic", &FlowResult::diagnostic)
        .def_property_readonly("verdict", [](const FlowResult& r) { return std::string(to_string(r.verdict)); });

    m.def(
        "analyze", [](const Network& net, const std::string& mode) { return analyze_all(net, mode_of(mode)); },
        py::arg("network"), py::arg("mode") = "buffer-aware");
    m.def(
        "blocking_json",
        [](const Network& net, const std::string& mode) {
            return render_blocking(net, BlockingAnalyzer(net, mode_of(mode)).report_all());
        },
        py::arg("network"), py::arg("mode") = "buffer-aware");

    py::class_<FlowSimStats>(m, "FlowSimStats")
        .def_readonly("id", &FlowSimStats::id)
        .def_readonly("packets", &FlowSimStats::packets)
        .def_readonly("max_latency", &FlowSimStats::max_latency)
        .def_readonly("mean_latency", &FlowSimStats::mean_latency);
    py::class_<SimReport>(m, "SimReport")
        .def_property_readonly("outcome", [](const SimReport& r) { return std::string(to_string(r.outcome)); })
        .def_readonly("diagnostic", &SimReport::diagnostic)
        .def_readonly("tick", &SimReport::tick)
        .def_readonly("trials", &SimReport::trials)
        .def_readonly("flows", &SimReport::flows);

    m.def(
        "simulate",
        [](const Network& net, double horizon, std::size_t trials, std::uint64_t seed, double flit_size) {
            SimOptions opt;
            opt.horizon = horizon;
            opt.seed = seed;
            opt.flit_size = flit_size;
            py::gil_scoped_release release;
            return sweep_offsets(net, opt, trials, seed);
        },
        py::arg("network"), py::arg("horizon"), py::arg("trials") = 1, py::arg("seed") = 1,
        py::arg("flit_size") = 1.0);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
