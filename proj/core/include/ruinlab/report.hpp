// SPDX-License-Identifier: Apache-2.0

#ifndef RUINLAB_REPORT_HPP
#define RUINLAB_REPORT_HPP

#include <string>
#include <vector>

#include "ruinlab/analytic.hpp"
#include "ruinlab/estimators.hpp"

namespace ruinlab {

enum class ReportFormat { Csv, Json };

/// One estimator result row; the CSV schema is
/// estimand,u,a,b,s,n,value,stderr,censored_frac,seed
struct ReportRow {
    std::string estimand;
    double u = 0.0;
    double a = 0.0;
    double b = 0.0;
    double s = 0.0;
    std::int64_t n = 0;
    double value = 0.0;
    double stderr_ = 0.0;
    double censored_frac = 0.0;
    std::uint64_t seed = 0;
};

ReportRow make_row(std::string estimand, const MCEstimate& est, double u = 0.0,
                   double a = 0.0, double b = 0.0, double s = 0.0);

/// Render rows; throws std::invalid_argument on an empty result set.
std::string render_report(const std::vector<ReportRow>& rows, ReportFormat format);

/// Event-log CSV: t,kind,size,state_before,state_after (absolute times).
std::string render_event_log(const std::vector<EventRecord>& log);

/// ExpMixtureLaw CSV: atom,weight_i,rate_i rows.
std::string render_mixture_law(const ExpMixtureLaw& law);

/// u,value curve CSV.
std::string render_curve(const std::vector<double>& u,
                         const std::vector<double>& value);

// ---------------------------------------------------------------------------
// Verification suite (built-in fixtures; analytic laws vs Monte Carlo)

struct VerifyRow {
    std::string quantity;
    double analytic = 0.0;
    double mc = 0.0;
    double stderr_ = 0.0;
    double z = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::vector<VerifyRow> rows;
    bool pass = false;
    double z_tolerance = 3.0;
};

/// Built-in fixture: scalar model with premium rate 2 (Exp(1) sizes), claim
/// rate 1 (Erlang(2, 20) sizes).
ModelSpec fixture_model();
/// Same model with the reduced premium parameter c = 4.
ModelSpec fixture_model_star();

/// Compare closed-form laws (supremum CDF, exit-low probability, modified
/// ruin, overshoot mass) against Monte Carlo on the built-in fixtures.
VerifyReport run_verify_suite(const McOptions& opts, double z_tolerance = 3.0);

/// Assemble a verify row (exposed so the harness itself can be tested).
VerifyRow make_verify_row(std::string quantity, double analytic,
                          const MCEstimate& mc, double z_tolerance);

std::string render_verify(const VerifyReport& report, ReportFormat format);

} // namespace ruinlab

#endif
