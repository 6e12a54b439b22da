// SPDX-License-Identifier: Apache-2.0
//
// ruinlab command-line front end: configuration ingestion, Monte Carlo /
// closed-form dispatch, verification reports.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ruinlab/analytic.hpp"
#include "ruinlab/estimators.hpp"
#include "ruinlab/pricing.hpp"
#include "ruinlab/report.hpp"

namespace {

using namespace ruinlab;

struct CommonArgs {
    std::string model_path;
    std::string model_star_path;
    double u = 0.0, a = 0.0, b = 0.0, s = 0.0;
    double strike = 1.0, beta = 0.0;
    std::int64_t n = 1'000'000;
    std::uint64_t seed = kDefaultSeed;
    double horizon = 0.0;  // 0 = unlimited
    double barrier = 0.0;  // 0 = automatic (Lundberg-scaled)
    int workers = 0;
    std::string format = "csv";
    std::string out_path;
    std::string grid;
    std::string events_out;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ValidatedModel load_model(const std::string& path) {
    if (path.empty()) throw std::runtime_error("missing required --model <path>");
    return validate_model(parse_model(read_file(path)));
}

McOptions make_options(const CommonArgs& args) {
    if (args.n < 1) throw std::runtime_error("bad parameter: --n must be >= 1");
    McOptions opts;
    opts.n = args.n;
    opts.seed = args.seed;
    opts.workers = args.workers;
    if (args.horizon > 0.0) opts.horizon = args.horizon;
    if (args.barrier > 0.0) opts.barrier = args.barrier;
    return opts;
}

ReportFormat parse_format(const std::string& format) {
    if (format == "csv") return ReportFormat::Csv;
    if (format == "json") return ReportFormat::Json;
    throw std::runtime_error("bad parameter: --format must be csv or json");
}

std::vector<double> parse_grid(const std::string& grid,
                               std::vector<double> fallback) {
    if (grid.empty()) return fallback;
    std::string g = grid;
    std::replace(g.begin(), g.end(), ',', ' ');
    std::istringstream iss(g);
    std::vector<double> out;
    double v;
    while (iss >> v) out.push_back(v);
    if (out.empty()) throw std::runtime_error("bad parameter: empty --grid");
    return out;
}

void write_output(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file '" + out_path + "'");
    out << content;
}

void maybe_dump_events(const CommonArgs& args, const ValidatedModel& model) {
    if (args.events_out.empty()) return;
    RngStream rng(args.seed, 0);
    std::vector<EventRecord> log;
    int state = 0;
    for (int i = 0; i < 256; ++i) {
        EventRecord ev = step_event(model, state, rng);
        state = ev.state_after;
        log.push_back(ev);
    }
    write_output(render_event_log(log), args.events_out);
}

int run_command(const std::string& command, const CommonArgs& args) {
    const ReportFormat format = parse_format(args.format);

    if (command == "verify") {
        const VerifyReport report = run_verify_suite(make_options(args));
        write_output(render_verify(report, format), args.out_path);
        return report.pass ? 0 : 2;
    }

    if (command == "validate") {
        const ModelSpec spec = parse_model(read_file(args.model_path));
        const auto issues = check_model(spec);
        if (issues.empty()) {
            std::cout << "ok: " << spec.chain.m << " state(s)\n";
            return 0;
        }
        for (const auto& issue : issues)
            std::cerr << "[" << issue.code << "] " << issue.message << "\n";
        return 1;
    }

    const ValidatedModel model = load_model(args.model_path);
    maybe_dump_events(args, model);
    const McOptions opts = make_options(args);
    std::vector<ReportRow> rows;

    if (command == "ruin") {
        rows.push_back(make_row("ruin", estimate_ruin(model, args.u, opts), args.u));
    } else if (command == "overjump") {
        const std::vector<double> grid =
            parse_grid(args.grid, {0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 1.0});
        OverjumpEstimate est = estimate_overjump(model, args.u, args.s, grid, grid, opts);
        rows.push_back(make_row("overjump_mass", est.total_mass, args.u, 0, 0, args.s));
        for (size_t i = 0; i < est.overshoot_grid.size(); ++i) {
            MCEstimate point = est.total_mass;
            point.value = est.overshoot_cum[i];
            point.stderr_ = 0.0;
            rows.push_back(make_row(
                "overjump_cum_y=" + std::to_string(est.overshoot_grid[i]), point,
                args.u, 0, 0, args.s));
        }
    } else if (command == "deficit") {
        const std::vector<double> grid =
            parse_grid(args.grid, {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 4.0});
        DeficitEstimate est = estimate_total_deficit(model, args.u, grid, opts);
        for (size_t i = 0; i < est.grid.size(); ++i)
            rows.push_back(make_row("deficit_x=" + std::to_string(est.grid[i]),
                                    est.cdf[i], args.u));
        rows.push_back(make_row("ruin", est.ruin, args.u));
    } else if (command == "red-period") {
        RecoveryEstimate est = estimate_recovery_red(model, args.u, args.s, opts);
        rows.push_back(make_row("recovery", est.recovery, args.u, 0, 0, args.s));
        rows.push_back(make_row("red_period", est.red_period, args.u, 0, 0, args.s));
    } else if (command == "two-boundary") {
        IntervalExitEstimate est = estimate_interval_exit(model, args.u, args.b, opts);
        rows.push_back(make_row("exit_low", est.p_low, args.u, 0, args.b));
        rows.push_back(make_row("exit_high", est.p_high, args.u, 0, args.b));
        rows.push_back(make_row("exit_low_overshoot_mean", est.low_overshoot_mean,
                                args.u, 0, args.b));
    } else if (command == "modified-ruin") {
        const ValidatedModel star = load_model(args.model_star_path.empty()
                                                   ? args.model_path
                                                   : args.model_star_path);
        rows.push_back(make_row(
            "modified_ruin",
            estimate_modified_ruin(model, star, args.u, args.a, args.b, opts),
            args.u, args.a, args.b));
    } else if (command == "gerber-shiu") {
        const ValidatedModel star = load_model(args.model_star_path.empty()
                                                   ? args.model_path
                                                   : args.model_star_path);
        GSQuery query;
        query.u = args.u;
        query.a = args.a;
        query.b = args.b;
        query.s = args.s;
        query.penalty = args.strike > 0.0 && args.beta != 0.0
                            ? make_put_penalty(args.strike, args.beta)
                            : make_constant_penalty(1.0);
        rows.push_back(make_row("gerber_shiu", gerber_shiu(model, star, query, opts),
                                args.u, args.a, args.b, args.s));
    } else if (command == "price-put") {
        const ValidatedModel star = load_model(args.model_star_path.empty()
                                                   ? args.model_path
                                                   : args.model_star_path);
        PutContract contract;
        contract.strike = args.strike;
        contract.log_boundary = args.beta;
        contract.discount = args.s;
        contract.log_price = args.u;
        rows.push_back(make_row(
            "put_price",
            price_perpetual_put(model, star, contract, args.a, args.b, opts), args.u,
            args.a, args.b, args.s));
    } else {
        throw std::runtime_error("unknown command '" + command + "'");
    }

    write_output(render_report(rows, format), args.out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ruinlab: Markov-modulated risk process simulation and analytics"};
    app.require_subcommand(1);

    CommonArgs args;
    if (const char* env_seed = std::getenv("RUINLAB_SEED"))
        args.seed = std::strtoull(env_seed, nullptr, 10);

    const std::vector<std::string> commands = {
        "validate",   "ruin",        "overjump",    "deficit",  "red-period",
        "two-boundary", "modified-ruin", "gerber-shiu", "price-put", "verify"};
    for (const std::string& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--model", args.model_path, "model configuration path");
        sub->add_option("--model-star", args.model_star_path,
                        "reduced-premium model configuration path");
        sub->add_option("--u", args.u, "level / initial reserve");
        sub->add_option("--a", args.a, "upper switching offset");
        sub->add_option("--b", args.b, "lower switching offset / interval width");
        sub->add_option("--s", args.s, "discount force");
        sub->add_option("--K", args.strike, "put strike");
        sub->add_option("--beta", args.beta, "log exercise boundary");
        sub->add_option("--n", args.n, "replications (default 1e6)");
        sub->add_option("--seed", args.seed, "master seed (default 42424242)");
        sub->add_option("--horizon", args.horizon, "time horizon (0 = unlimited)");
        sub->add_option("--barrier", args.barrier,
                        "safe-barrier width (0 = Lundberg-scaled default)");
        sub->add_option("--workers", args.workers, "worker threads (0 = hardware)");
        sub->add_option("--format", args.format, "output format: csv|json");
        sub->add_option("--out", args.out_path, "output path (default stdout)");
        sub->add_option("--grid", args.grid, "comma-separated grid (deficit/overjump)");
        sub->add_option("--events-out", args.events_out,
                        "debug: write one replication's event log CSV");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        return run_command(app.get_subcommands().front()->get_name(), args);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "model parse error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
