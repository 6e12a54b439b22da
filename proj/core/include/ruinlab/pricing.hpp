// SPDX-License-Identifier: Apache-2.0

#ifndef RUINLAB_PRICING_HPP
#define RUINLAB_PRICING_HPP

#include <functional>
#include <string>

#include "ruinlab/estimators.hpp"

namespace ruinlab {

/// Nonnegative penalty w(undershoot, overshoot) evaluated at ruin of the
/// modified process. Must be a pure function (replications run concurrently).
struct PenaltyFn {
    std::function<double(double x, double y)> eval;
    std::string tag = "custom";
};

/// Constant penalty w == value.
PenaltyFn make_constant_penalty(double value = 1.0);

/// Perpetual-put payoff penalty w(x, y) = (K - exp(beta - y))_+ — depends on
/// the overshoot only. Requires K > 0.
PenaltyFn make_put_penalty(double strike, double log_boundary);

struct PutContract {
    double strike = 1.0;        // K > 0
    double log_boundary = 0.0;  // beta, with exp(beta) <= min(exp(u), K)
    double discount = 0.0;      // s > 0
    double log_price = 0.0;     // u
};

struct GSQuery {
    double u = 0.0;
    double a = 0.0;
    double b = 0.0;
    double s = 0.0;
    PenaltyFn penalty = make_constant_penalty();
};

/// Gerber-Shiu discounted penalty on the modified process:
///   E[ e^{-s tau~+(u)} w(gamma~_+(u), gamma~^+(u)); tau~+(u) < infinity ].
/// With w == 1 and s = 0 this is exactly the modified ruin estimator (same
/// replication path, bit-identical on shared seeds).
MCEstimate gerber_shiu(const ValidatedModel& model, const ValidatedModel& model_star,
                       const GSQuery& query, const McOptions& opts = {});

/// Perpetual American put price E[e^{-s tau~+(u-beta)} (K - e^{beta - gamma~+})_+]
/// via gerber_shiu at level u - beta; the modified dynamics use the same level.
MCEstimate price_perpetual_put(const ValidatedModel& model,
                               const ValidatedModel& model_star,
                               const PutContract& contract, double a, double b,
                               const McOptions& opts = {});

struct BoundarySearchResult {
    double best_beta = 0.0;
    MCEstimate best_price;
    std::vector<double> betas;
    std::vector<MCEstimate> prices;
};

/// Grid search for the exercise boundary maximizing the put price, under
/// common random numbers (the same replication streams for every beta).
BoundarySearchResult boundary_search(const ValidatedModel& model,
                                     const ValidatedModel& model_star, double u,
                                     double strike, double s,
                                     const std::vector<double>& beta_grid, double a,
                                     double b, const McOptions& opts = {});

} // namespace ruinlab

#endif
