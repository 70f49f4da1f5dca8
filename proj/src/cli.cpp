#include "whnc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "whnc/analysis.hpp"
#include "whnc/errors.hpp"
#include "whnc/report.hpp"
#include "whnc/simulator.hpp"

namespace whnc {

namespace {

struct Common {
    std::string input;
    std::string format = "table";
    std::string output;
};

struct Loaded {
    Document doc;
    Network net;
};

std::optional<Loaded> load(const std::string& path, std::ostream& err)
{
    try {
        Document doc = load_config(path);
        Network net = Network::build(doc);
        return Loaded{std::move(doc), std::move(net)};
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return std::nullopt;
    }
}

// Writes to --output when given, otherwise to `out`.
bool emit(const Common& c, const std::string& text, std::ostream& out, std::ostream& err)
{
    if (c.output.empty()) {
        out << text;
        return true;
    }
    std::ofstream file(c.output);
    if (!file) {
        err << "error: cannot write '" << c.output << "'\n";
        return false;
    }
    file << text;
    return static_cast<bool>(file);
}

int exit_for(const std::vector<FlowResult>& results)
{
    int code = kExitOk;
    for (const auto& r : results) {
        if (r.verdict == Verdict::Unstable)
            return kExitInvalid;
        if (r.verdict == Verdict::DeadlineMiss)
            code = kExitDeadlineMiss;
    }
    return code;
}

// Violations that make the analysis meaningless rather than unstable.
bool blocks_analysis(const ValidationReport& report, std::ostream& err)
{
    if (!report.has(ViolationKind::Cycle) && !report.has(ViolationKind::Buffer))
        return false;
    for (const auto& v : report.violations)
        err << "error: [" << to_string(v.kind) << "] " << v.message << "\n";
    return true;
}

void warn_violations(const ValidationReport& report, std::ostream& err)
{
    for (const auto& v : report.violations)
        err << "warning: [" << to_string(v.kind) << "] " << v.message << "\n";
}

int cmd_validate(const Common& c, std::ostream& out, std::ostream& err)
{
    auto loaded = load(c.input, err);
    if (!loaded)
        return kExitInvalid;
    ValidationReport report = validate(loaded->net);
    if (!emit(c, render_validation(report, parse_format(c.format)), out, err))
        return kExitInvalid;
    return report.ok() ? kExitOk : kExitInvalid;
}

int cmd_analyze(const Common& c, const std::string& mode, std::optional<double> buffer, std::ostream& out,
                std::ostream& err)
{
    auto loaded = load(c.input, err);
    if (!loaded)
        return kExitInvalid;
    Network net = buffer ? loaded->net.with_buffer(*buffer) : loaded->net;
    ValidationReport report = validate(net);
    if (blocks_analysis(report, err))
        return kExitInvalid;
    warn_violations(report, err);
    Format format = parse_format(c.format);

    std::string text;
    int code = kExitOk;
    if (mode == "both") {
        auto aware = std::async(std::launch::async, [&] { return analyze_all(net, BlockingMode::BufferAware); });
        auto conventional = analyze_all(net, BlockingMode::Conventional);
        auto aware_results = aware.get();
        text = render_comparison(net, aware_results, conventional, format);
        code = std::max(exit_for(aware_results), exit_for(conventional));
    } else {
        BlockingMode m = parse_blocking_mode(mode);
        auto results = analyze_all(net, m);
        text = render_results(net, results, m, format);
        code = exit_for(results);
    }
    if (!report.ok())
        code = kExitInvalid;
    if (!emit(c, text, out, err))
        return kExitInvalid;
    return code;
}

int cmd_sweep(const Common& c, double lo, double hi, double step, const std::string& mode, std::ostream& out,
              std::ostream& err)
{
    if (!(lo >= 1.0) || !(step >= 1.0) || !(lo <= hi)) {
        err << "error: sweep range needs buffer-min >= 1, step >= 1 and buffer-min <= buffer-max\n";
        return kExitInvalid;
    }
    auto loaded = load(c.input, err);
    if (!loaded)
        return kExitInvalid;
    ValidationReport base = validate(loaded->net.with_buffer(lo));
    if (base.has(ViolationKind::Cycle)) {
        blocks_analysis(base, err);
        return kExitInvalid;
    }

    std::vector<BlockingMode> modes;
    if (mode == "both")
        modes = {BlockingMode::BufferAware, BlockingMode::Conventional};
    else
        modes = {parse_blocking_mode(mode)};

    std::vector<double> points;
    for (std::size_t n = 0;; ++n) {
        double b = lo + static_cast<double>(n) * step;
        if (b > hi)
            break;
        points.push_back(b);
    }

    // Points are split into contiguous chunks, one per worker; rows are
    // concatenated back in ascending buffer order.
    using Rows = std::vector<SweepRow>;
    auto evaluate = [&](std::size_t from, std::size_t to) {
        Rows rows;
        for (std::size_t n = from; n < to; ++n) {
            Network net = loaded->net.with_buffer(points[n]);
            for (BlockingMode m : modes)
                for (const FlowResult& r : analyze_all(net, m))
                    rows.push_back({points[n], m, r.id, r.total, r.verdict});
        }
        return rows;
    };
    std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
    workers = std::min(workers, points.size());
    std::vector<std::future<Rows>> parts;
    std::size_t chunk = (points.size() + workers - 1) / workers;
    for (std::size_t from = 0; from < points.size(); from += chunk)
        parts.push_back(std::async(std::launch::async, evaluate, from, std::min(points.size(), from + chunk)));
    Rows rows;
    for (auto& p : parts) {
        Rows part = p.get();
        rows.insert(rows.end(), part.begin(), part.end());
    }

    if (!emit(c, render_sweep(rows, modes.size() > 1, parse_format(c.format)), out, err))
        return kExitInvalid;
    bool unstable = std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.verdict == Verdict::Unstable; });
    return unstable ? kExitInvalid : kExitOk;
}

int cmd_simulate(const Common& c, std::optional<std::size_t> trials, std::optional<std::uint64_t> seed,
                 std::optional<double> horizon, std::optional<double> buffer, std::ostream& out, std::ostream& err)
{
    auto loaded = load(c.input, err);
    if (!loaded)
        return kExitInvalid;
    const Network net = buffer ? loaded->net.with_buffer(*buffer) : loaded->net;
    ValidationReport report = validate(net);
    if (!report.ok()) {
        for (const auto& v : report.violations)
            err << "error: [" << to_string(v.kind) << "] " << v.message << "\n";
        return kExitInvalid;
    }
    std::vector<FlowResult> bounds = analyze_all(net, BlockingMode::BufferAware);
    if (exit_for(bounds) == kExitInvalid) {
        for (const auto& r : bounds)
            if (!r.diagnostic.empty())
                err << "error: " << r.id << ": " << r.diagnostic << "\n";
        return kExitInvalid;
    }

    SimSpec spec = loaded->doc.sim.value_or(SimSpec{});
    if (horizon)
        spec.horizon = *horizon;
    if (spec.horizon <= 0.0) {
        double longest = 0.0;
        for (const Flow& f : net.flows())
            longest = std::max(longest, f.period);
        spec.horizon = 10.0 * longest;
        err << "note: no simulation horizon given, using " << format_number(spec.horizon) << "\n";
    }
    SimOptions options;
    try {
        options = sim_options(net, spec);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    std::size_t n_trials = trials.value_or(static_cast<std::size_t>(std::max(1, spec.trials)));
    SimReport sim = sweep_offsets(net, options, n_trials, seed.value_or(spec.seed));

    std::vector<BoundCheck> checks;
    bool sound = true;
    for (std::size_t k = 0; k < sim.flows.size(); ++k) {
        BoundCheck b{sim.flows[k].id, sim.flows[k].max_latency, bounds[k].total, true};
        // Observed latencies are whole ticks; allow for the rounding of the product only.
        b.sound = b.observed <= b.bound * (1.0 + kRelTol);
        sound = sound && b.sound;
        checks.push_back(b);
    }
    if (!emit(c, render_simulation(sim, checks, parse_format(c.format)), out, err))
        return kExitInvalid;
    if (sim.outcome == SimOutcome::Deadlock) {
        err << "error: " << sim.diagnostic << "\n";
        return kExitUnsound;
    }
    for (const auto& b : checks)
        if (!b.sound)
            err << "error: flow " << b.flow << " observed " << format_number(b.observed) << " above bound "
                << format_number(b.bound) << "\n";
    return sound ? kExitOk : kExitUnsound;
}

int cmd_blocking(const Common& c, const std::string& mode, std::optional<double> buffer, std::ostream& out,
                 std::ostream& err)
{
    auto loaded = load(c.input, err);
    if (!loaded)
        return kExitInvalid;
    Network net = buffer ? loaded->net.with_buffer(*buffer) : loaded->net;
    ValidationReport report = validate(net);
    if (report.has(ViolationKind::Buffer)) {
        blocks_analysis(report, err);
        return kExitInvalid;
    }
    BlockingAnalyzer analyzer(net, parse_blocking_mode(mode));
    return emit(c, render_blocking(net, analyzer.report_all()), out, err) ? kExitOk : kExitInvalid;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Worst-case latency analysis for wormhole networks-on-chip", "whnc"};
    app.require_subcommand(1);

    Common common;
    std::string mode = "buffer-aware";
    double buffer = 0.0;
    double lo = 0.0, hi = 0.0, step = 1.0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    double horizon = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("file", common.input, "Network and flow description (JSON)")->required();
        sub->add_option("--format", common.format, "Output format")
            ->check(CLI::IsMember({"table", "csv", "json"}))
            ->capture_default_str();
        sub->add_option("--output", common.output, "Write data to this file instead of stdout");
    };
    auto mode_check = CLI::IsMember({"buffer-aware", "aware", "conventional", "both"});

    auto* validate_cmd = app.add_subcommand("validate", "Check stability and buffer conditions");
    add_common(validate_cmd);

    auto* analyze_cmd = app.add_subcommand("analyze", "Per-flow end-to-end delay bounds");
    add_common(analyze_cmd);
    analyze_cmd->add_option("--mode", mode, "Blocking model")->check(mode_check)->capture_default_str();
    auto* analyze_buffer = analyze_cmd->add_option("--buffer", buffer, "Uniform input buffer size in bytes")
                               ->check(CLI::PositiveNumber);

    auto* sweep_cmd = app.add_subcommand("sweep", "Bounds over a range of buffer sizes");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--buffer-min", lo, "Smallest buffer in bytes")->required();
    sweep_cmd->add_option("--buffer-max", hi, "Largest buffer in bytes")->required();
    sweep_cmd->add_option("--step", step, "Buffer increment in bytes")->capture_default_str();
    sweep_cmd->add_option("--mode", mode, "Blocking model")->check(mode_check)->capture_default_str();

    auto* compare_cmd = app.add_subcommand("compare", "Buffer-aware against conventional bounds");
    add_common(compare_cmd);
    auto* compare_buffer = compare_cmd->add_option("--buffer", buffer, "Uniform input buffer size in bytes")
                               ->check(CLI::PositiveNumber);

    auto* simulate_cmd = app.add_subcommand("simulate", "Flit-level simulation checked against the bounds");
    add_common(simulate_cmd);
    auto* trials_opt = simulate_cmd->add_option("--trials", trials, "Number of release-offset trials")
                           ->check(CLI::PositiveNumber);
    auto* seed_opt = simulate_cmd->add_option("--seed", seed, "Random seed for offsets and jitter");
    auto* horizon_opt = simulate_cmd->add_option("--horizon", horizon, "Release packets before this time")
                            ->check(CLI::PositiveNumber);
    auto* simulate_buffer = simulate_cmd->add_option("--buffer", buffer, "Uniform input buffer size in bytes")
                                ->check(CLI::PositiveNumber);

    auto* blocking_cmd = app.add_subcommand("blocking", "Dump direct and indirect blocking sets as JSON");
    add_common(blocking_cmd);
    blocking_cmd->add_option("--mode", mode, "Blocking model")
        ->check(CLI::IsMember({"buffer-aware", "aware", "conventional"}))
        ->capture_default_str();
    auto* blocking_buffer = blocking_cmd->add_option("--buffer", buffer, "Uniform input buffer size in bytes")
                                ->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
            sub && e.get_exit_code() == 0) {
            out << sub->help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }

    auto given = [](CLI::Option* o) { return o->count() > 0; };
    try {
        if (validate_cmd->parsed())
            return cmd_validate(common, out, err);
        if (analyze_cmd->parsed())
            return cmd_analyze(common, mode, given(analyze_buffer) ? std::optional(buffer) : std::nullopt, out, err);
        if (sweep_cmd->parsed())
            return cmd_sweep(common, lo, hi, step, mode, out, err);
        if (compare_cmd->parsed())
            return cmd_analyze(common, "both", given(compare_buffer) ? std::optional(buffer) : std::nullopt, out,
                               err);
        if (simulate_cmd->parsed())
            return cmd_simulate(common, given(trials_opt) ? std::optional(trials) : std::nullopt,
                                given(seed_opt) ? std::optional(seed) : std::nullopt,
                                given(horizon_opt) ? std::optional(horizon) : std::nullopt,
                                given(simulate_buffer) ? std::optional(buffer) : std::nullopt, out, err);
        if (blocking_cmd->parsed())
            return cmd_blocking(common, mode, given(blocking_buffer) ? std::optional(buffer) : std::nullopt, out,
                                err);
    } catch (const CycleError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}

} // namespace whnc
