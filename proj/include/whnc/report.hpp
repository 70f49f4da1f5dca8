// report.hpp - Table, CSV and JSON renderings of validation, analysis,
// sweep, blocking and simulation results.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "whnc/analysis.hpp"
#include "whnc/blocking.hpp"
#include "whnc/model.hpp"
#include "whnc/simulator.hpp"

namespace whnc {

enum class Format { Table, Csv, Json };

Format parse_format(const std::string& text);

// Shortest representation that reads back to the same double.
std::string format_number(double v);

struct SweepRow {
    double buffer = 0.0;
    BlockingMode mode = BlockingMode::BufferAware;
    std::string flow;
    double total = 0.0;
    Verdict verdict = Verdict::Schedulable;
};

struct BoundCheck {
    std::string flow;
    double observed = 0.0;
    double bound = 0.0;
    bool sound = true;
    double ratio() const { return bound > 0.0 ? observed / bound : 0.0; }
};

nlohmann::ordered_json to_json(const FlowResult& r, const Network& net);

std::string render_validation(const ValidationReport& report, Format format);
std::string render_results(const Network& net, const std::vector<FlowResult>& results, BlockingMode mode,
                           Format format);
std::string render_comparison(const Network& net, const std::vector<FlowResult>& aware,
                              const std::vector<FlowResult>& conventional, Format format);
// CSV columns: buffer,flow,d_eed,verdict (a mode column follows buffer when
// `with_mode` is set).
std::string render_sweep(const std::vector<SweepRow>& rows, bool with_mode, Format format);
std::string render_blocking(const Network& net, const BlockingReport& report);
std::string render_simulation(const SimReport& report, const std::vector<BoundCheck>& checks, Format format);

} // namespace whnc
