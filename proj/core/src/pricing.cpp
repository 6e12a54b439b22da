// SPDX-License-Identifier: Apache-2.0

#include "ruinlab/pricing.hpp"

#include <cmath>
#include <stdexcept>

#include "ruinlab/analytic.hpp"
#include "ruinlab/parallel.hpp"

namespace ruinlab {

PenaltyFn make_constant_penalty(double value) {
    if (value < 0.0) throw std::invalid_argument("penalty must be nonnegative");
    PenaltyFn w;
    w.eval = [value](double, double) { return value; };
    w.tag = "constant";
    return w;
}

PenaltyFn make_put_penalty(double strike, double log_boundary) {
    if (!(strike > 0.0)) throw std::invalid_argument("put penalty: strike must be > 0");
    PenaltyFn w;
    w.eval = [strike, log_boundary](double, double y) {
        return std::max(0.0, strike - std::exp(log_boundary - y));
    };
    w.tag = "put";
    return w;
}

namespace {

void check_penalty(const PenaltyFn& w) {
    if (!w.eval) throw std::invalid_argument("penalty function is empty");
    // spot-check nonnegativity and finiteness on a coarse grid
    for (double x : {1e-3, 0.1, 1.0, 10.0})
        for (double y : {1e-3, 0.1, 1.0, 10.0}) {
            const double v = w.eval(x, y);
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument(
                    "penalty must be nonnegative and finite on bounded sets");
        }
}

} // namespace

MCEstimate gerber_shiu(const ValidatedModel& model, const ValidatedModel& model_star,
                       const GSQuery& query, const McOptions& opts) {
    if (!(query.a > 0.0) || query.a > query.b)
        throw std::invalid_argument("gerber_shiu: requires 0 < a <= b");
    if (!(query.u > 0.0)) throw std::invalid_argument("gerber_shiu: requires u > 0");
    if (query.s < 0.0) throw std::invalid_argument("gerber_shiu: requires s >= 0");
    check_penalty(query.penalty);
    {
        const auto issues = check_modified_pair(model, model_star);
        if (!issues.empty()) throw ValidationError(issues);
    }
    if ((model.stationary_drift() >= 0.0 || model_star.stationary_drift() >= 0.0) &&
        !std::isfinite(opts.horizon) && !opts.barrier.has_value())
        throw std::invalid_argument(
            "gerber_shiu: non-negative drift in a regime; set an explicit "
            "horizon or barrier");

    ModifiedOptions mopts;
    mopts.horizon = opts.horizon;
    if (opts.barrier.has_value())
        mopts.barrier = *opts.barrier;
    else if (model_star.stationary_drift() < 0.0)
        mopts.barrier = censoring_plan(model_star, opts).barrier;

    struct Acc {
        double sum = 0.0;
        double sum_sq = 0.0;
        double max_term = 0.0;
        std::int64_t n = 0;
        std::int64_t censored = 0;
        void merge(const Acc& o) {
            sum += o.sum;
            sum_sq += o.sum_sq;
            max_term = std::max(max_term, o.max_term);
            n += o.n;
            censored += o.censored;
        }
    };

    const auto& w = query.penalty.eval;
    Acc acc = run_replications<Acc>(
        opts.n, opts.workers, [&](std::int64_t rep, Acc& a) {
            RngStream rng(opts.seed, static_cast<std::uint64_t>(rep));
            const ModifiedOutcome out = simulate_modified(model, model_star, query.u,
                                                          query.a, query.b, rng, mopts);
            double term = 0.0;
            if (out.ruined) {
                const double discount =
                    query.s > 0.0 ? std::exp(-query.s * out.tau) : 1.0;
                term = discount *
                       w(out.undershoot(query.u), out.overshoot(query.u));
                if (!std::isfinite(term))
                    throw std::runtime_error("gerber_shiu: penalty evaluated non-finite");
            }
            a.sum += term;
            a.sum_sq += term * term;
            a.max_term = std::max(a.max_term, term);
            ++a.n;
            if (out.censored == CensorReason::Horizon) ++a.censored;
        });

    MCEstimate est = make_estimate(acc.sum, acc.sum_sq, acc.n, acc.censored, opts.seed);
    // running-variance guard: one replication dominating the sum hints at an
    // unbounded (infinite-variance) penalty
    if (acc.n > 1000 && acc.max_term > 0.0 && acc.max_term > 0.01 * acc.sum)
        est.variance_warning = true;
    return est;
}

MCEstimate price_perpetual_put(const ValidatedModel& model,
                               const ValidatedModel& model_star,
                               const PutContract& contract, double a, double b,
                               const McOptions& opts) {
    if (!(contract.strike > 0.0))
        throw std::invalid_argument("put contract: strike must be > 0");
    if (std::exp(contract.log_boundary) >
        std::min(std::exp(contract.log_price), contract.strike) * (1.0 + 1e-12))
        throw std::invalid_argument(
            "put contract: requires exp(beta) <= min(exp(u), K)");
    const double level = contract.log_price - contract.log_boundary;
    if (!(level > 0.0))
        throw std::invalid_argument("put contract: requires u - beta > 0");

    GSQuery query;
    query.u = level;
    query.a = a;
    query.b = b;
    query.s = contract.discount;
    query.penalty = make_put_penalty(contract.strike, contract.log_boundary);
    return gerber_shiu(model, model_star, query, opts);
}

BoundarySearchResult boundary_search(const ValidatedModel& model,
                                     const ValidatedModel& model_star, double u,
                                     double strike, double s,
                                     const std::vector<double>& beta_grid, double a,
                                     double b, const McOptions& opts) {
    if (beta_grid.empty())
        throw std::invalid_argument("boundary_search: empty beta grid");
    for (double beta : beta_grid) {
        if (std::exp(beta) > std::min(std::exp(u), strike) * (1.0 + 1e-12) ||
            !(u - beta > 0.0))
            throw std::invalid_argument(
                "boundary_search: grid point beta = " + std::to_string(beta) +
                " violates the contract constraint");
    }

    BoundarySearchResult result;
    result.betas = beta_grid;
    size_t best = 0;
    for (size_t i = 0; i < beta_grid.size(); ++i) {
        PutContract contract;
        contract.strike = strike;
        contract.log_boundary = beta_grid[i];
        contract.discount = s;
        contract.log_price = u;
        // common random numbers: the same seed (hence the same replication
        // streams) for every beta
        result.prices.push_back(price_perpetual_put(model, model_star, contract, a, b, opts));
        if (result.prices[i].value > result.prices[best].value) best = i;
    }
    result.best_beta = beta_grid[best];
    result.best_price = result.prices[best];
    return result;
}

} // namespace ruinlab
