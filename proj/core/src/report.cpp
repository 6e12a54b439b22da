// SPDX-License-Identifier: Apache-2.0

#include "ruinlab/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace ruinlab {

namespace {

// shortest decimal that parses back to the same double
std::string fmt(double v) {
    char buf[40];
    for (int precision = 1; precision <= 16; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::Premium: return "premium";
        case EventKind::Claim: return "claim";
        case EventKind::ChainSwitch: return "chain-switch";
    }
    return "?";
}

} // namespace

ReportRow make_row(std::string estimand, const MCEstimate& est, double u, double a,
                   double b, double s) {
    ReportRow row;
    row.estimand = std::move(estimand);
    row.u = u;
    row.a = a;
    row.b = b;
    row.s = s;
    row.n = est.n;
    row.value = est.value;
    row.stderr_ = est.stderr_;
    row.censored_frac = est.censored_frac;
    row.seed = est.seed;
    return row;
}

std::string render_report(const std::vector<ReportRow>& rows, ReportFormat format) {
    if (rows.empty())
        throw std::invalid_argument("render_report: empty result set");
    if (format == ReportFormat::Csv) {
        std::ostringstream os;
        os << "estimand,u,a,b,s,n,value,stderr,censored_frac,seed\n";
        for (const ReportRow& r : rows) {
            os << r.estimand << ',' << fmt(r.u) << ',' << fmt(r.a) << ',' << fmt(r.b)
               << ',' << fmt(r.s) << ',' << r.n << ',' << fmt(r.value) << ','
               << fmt(r.stderr_) << ',' << fmt(r.censored_frac) << ',' << r.seed
               << '\n';
        }
        return os.str();
    }
    nlohmann::json arr = nlohmann::json::array();
    for (const ReportRow& r : rows) {
        arr.push_back({{"estimand", r.estimand},
                       {"u", r.u},
                       {"a", r.a},
                       {"b", r.b},
                       {"s", r.s},
                       {"n", r.n},
                       {"value", r.value},
                       {"stderr", r.stderr_},
                       {"censored_frac", r.censored_frac},
                       {"seed", r.seed}});
    }
    return arr.dump(2) + "\n";
}

std::string render_event_log(const std::vector<EventRecord>& log) {
    std::ostringstream os;
    os << "t,kind,size,state_before,state_after\n";
    double t = 0.0;
    for (const EventRecord& ev : log) {
        t += ev.dt;
        os << fmt(t) << ',' << kind_name(ev.kind) << ',' << fmt(ev.size) << ','
           << ev.state_before + 1 << ',' << ev.state_after + 1 << '\n';
    }
    return os.str();
}

std::string render_mixture_law(const ExpMixtureLaw& law) {
    std::ostringstream os;
    os << "atom,weight,rate\n";
    if (law.weights.empty()) {
        os << fmt(law.atom) << ",0,0\n";
        return os.str();
    }
    for (size_t i = 0; i < law.weights.size(); ++i)
        os << fmt(law.atom) << ',' << fmt(law.weights[i]) << ','
           << fmt(law.rates[i]) << '\n';
    return os.str();
}

std::string render_curve(const std::vector<double>& u,
                         const std::vector<double>& value) {
    if (u.size() != value.size())
        throw std::invalid_argument("render_curve: length mismatch");
    std::ostringstream os;
    os << "u,value\n";
    for (size_t i = 0; i < u.size(); ++i) os << fmt(u[i]) << ',' << fmt(value[i]) << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// Verify suite

ModelSpec fixture_model() {
    ModelSpec spec;
    spec.chain.m = 1;
    spec.chain.q = Eigen::MatrixXd::Zero(1, 1);
    StateParams p;
    p.lambda1 = 2.0;
    p.lambda2 = 1.0;
    p.c = 1.0;
    p.claim = ClaimLaw::erlang(2, 20.0);
    spec.states.push_back(p);
    return spec;
}

ModelSpec fixture_model_star() {
    ModelSpec spec = fixture_model();
    spec.states[0].c = 4.0;
    return spec;
}

VerifyRow make_verify_row(std::string quantity, double analytic,
                          const MCEstimate& mc, double z_tolerance) {
    VerifyRow row;
    row.quantity = std::move(quantity);
    row.analytic = analytic;
    row.mc = mc.value;
    row.stderr_ = mc.stderr_;
    const double diff = mc.value - analytic;
    if (mc.stderr_ > 0.0) {
        row.z = diff / mc.stderr_;
    } else {
        row.z = std::abs(diff) < 1e-12 ? 0.0
                                       : std::numeric_limits<double>::infinity();
    }
    row.pass = std::abs(row.z) <= z_tolerance;
    return row;
}

VerifyReport run_verify_suite(const McOptions& opts, double z_tolerance) {
    const ValidatedModel base = validate_model(fixture_model());
    const ValidatedModel star = validate_model(fixture_model_star());

    VerifyReport report;
    report.z_tolerance = z_tolerance;

    const ExpMixtureLaw star_sup = sup_law(star);
    for (double u : {0.05, 0.1, 0.2, 0.5}) {
        const MCEstimate ruin = estimate_ruin(star, u, opts);
        MCEstimate cdf_mc = ruin;
        cdf_mc.value = 1.0 - ruin.value;  // P{xi+ < u} = 1 - P{tau+(u) < inf}
        report.rows.push_back(make_verify_row("sup_cdf(u=" + std::to_string(u) + ")",
                                              star_sup.cdf(u), cdf_mc, z_tolerance));
    }

    const ExitLowCurve curve = exit_low_curve(base);
    const std::vector<std::pair<double, double>> exit_pts{{0.1, 0.5}, {0.2, 0.5}, {0.1, 0.3}};
    for (const auto& [u, b] : exit_pts) {
        const IntervalExitEstimate est = estimate_interval_exit(base, u, b, opts);
        report.rows.push_back(make_verify_row(
            "exit_low(u=" + std::to_string(u) + ",b=" + std::to_string(b) + ")",
            curve.value(u, b), est.p_low, z_tolerance));
    }

    const std::vector<std::pair<double, double>> mod_pts{{0.1, 0.3}, {0.2, 0.3}, {0.1, 0.5}};
    for (const auto& [u, b] : mod_pts) {
        const MCEstimate est = estimate_modified_ruin(base, star, u, b, b, opts);
        report.rows.push_back(make_verify_row(
            "modified_ruin(u=" + std::to_string(u) + ",b=" + std::to_string(b) + ")",
            modified_ruin(base, star, u, b, b), est, z_tolerance));
    }

    {
        const OvershootLaw g(star);
        const MCEstimate ruin = estimate_ruin(star, 0.1, opts);
        report.rows.push_back(make_verify_row("overshoot_mass(u=0.1)",
                                              g.total_mass(0.1), ruin, z_tolerance));
    }

    report.pass = true;
    for (const VerifyRow& row : report.rows) report.pass = report.pass && row.pass;
    return report;
}

std::string render_verify(const VerifyReport& report, ReportFormat format) {
    if (format == ReportFormat::Csv) {
        std::ostringstream os;
        os << "quantity,analytic,mc,stderr,z,pass\n";
        for (const VerifyRow& r : report.rows)
            os << r.quantity << ',' << fmt(r.analytic) << ',' << fmt(r.mc) << ','
               << fmt(r.stderr_) << ',' << fmt(r.z) << ',' << (r.pass ? 1 : 0) << '\n';
        os << "overall,,,,," << (report.pass ? 1 : 0) << '\n';
        return os.str();
    }
    nlohmann::json arr = nlohmann::json::array();
    for (const VerifyRow& r : report.rows)
        arr.push_back({{"quantity", r.quantity},
                       {"analytic", r.analytic},
                       {"mc", r.mc},
                       {"stderr", r.stderr_},
                       {"z", r.z},
                       {"pass", r.pass}});
    nlohmann::json out = {{"rows", arr}, {"pass", report.pass}};
    return out.dump(2) + "\n";
}

} // namespace ruinlab
