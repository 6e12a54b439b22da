// SPDX-License-Identifier: Apache-2.0

#include "ruinlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ruinlab/analytic.hpp"
#include "ruinlab/parallel.hpp"

namespace ruinlab {

namespace {

constexpr double kBarrierLogBias = 25.0;  // exp(-25) < 1e-10 bias bound

struct SumAcc {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t n = 0;
    std::int64_t censored = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }
    void merge(const SumAcc& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        n += o.n;
        censored += o.censored;
    }
};

void require_negative_drift(const ValidatedModel& model, const McOptions& opts,
                            const char* what) {
    if (model.stationary_drift() >= 0.0 && !std::isfinite(opts.horizon) &&
        !opts.barrier.has_value())
        throw std::invalid_argument(
            std::string(what) +
            ": non-negative stationary drift; set an explicit horizon or barrier");
}

double resolve_barrier(const ValidatedModel& model, const McOptions& opts) {
    if (opts.barrier.has_value()) return *opts.barrier;
    if (model.stationary_drift() < 0.0) return censoring_plan(model, opts).barrier;
    return std::numeric_limits<double>::infinity();  // the horizon censors
}

} // namespace

MCEstimate make_estimate(double sum, double sum_sq, std::int64_t n,
                         std::int64_t censored, std::uint64_t seed) {
    MCEstimate e;
    e.n = n;
    e.seed = seed;
    if (n > 0) {
        e.value = sum / static_cast<double>(n);
        if (n > 1) {
            const double var =
                std::max(0.0, (sum_sq - sum * sum / static_cast<double>(n)) /
                                  static_cast<double>(n - 1));
            e.stderr_ = std::sqrt(var / static_cast<double>(n));
        }
        e.censored_frac = static_cast<double>(censored) / static_cast<double>(n);
    }
    return e;
}

CensoringPlan censoring_plan(const ValidatedModel& model, const McOptions& opts) {
    CensoringPlan plan;
    if (opts.barrier.has_value()) {
        plan.barrier = *opts.barrier;
        plan.decay_rate = smallest_positive_mixture_root(model);
        plan.bias_bound = std::isfinite(plan.decay_rate)
                              ? std::exp(-plan.decay_rate * plan.barrier)
                              : 0.0;
        return plan;
    }
    const double r1 = smallest_positive_mixture_root(model);
    if (!std::isfinite(r1)) {
        // no upward jumps anywhere: any level below the start is already safe
        plan.barrier = 0.0;
        plan.decay_rate = std::numeric_limits<double>::infinity();
        plan.bias_bound = 0.0;
        return plan;
    }
    plan.decay_rate = r1;
    plan.barrier = kBarrierLogBias / r1;
    plan.bias_bound = std::exp(-kBarrierLogBias);
    return plan;
}

MCEstimate estimate_ruin(const ValidatedModel& model, double u,
                         const McOptions& opts) {
    require_negative_drift(model, opts, "estimate_ruin");
    PassageOptions popts;
    popts.horizon = opts.horizon;
    popts.barrier = resolve_barrier(model, opts);

    SumAcc acc = run_replications<SumAcc>(
        opts.n, opts.workers, [&](std::int64_t rep, SumAcc& a) {
            RngStream rng(opts.seed, static_cast<std::uint64_t>(rep));
            const PassageOutcome out = first_passage_up(model, u, rng, popts);
            a.add(out.crossed ? 1.0 : 0.0);
            if (out.censored == CensorReason::Horizon) ++a.censored;
        });
    return make_estimate(acc.sum, acc.sum_sq, acc.n, acc.censored, opts.seed);
}

OverjumpEstimate estimate_overjump(const ValidatedModel& model, double u, double s,
                                   std::vector<double> overshoot_grid,
                                   std::vector<double> undershoot_grid,
                                   const McOptions& opts) {
    if (u < 0.0) throw std::invalid_argument("estimate_overjump: u must be >= 0");
    if (s < 0.0) throw std::invalid_argument("estimate_overjump: s must be >= 0");
    require_negative_drift(model, opts, "estimate_overjump");
    std::sort(overshoot_grid.begin(), overshoot_grid.end());
    std::sort(undershoot_grid.begin(), undershoot_grid.end());

    PassageOptions popts;
    popts.horizon = opts.horizon;
    popts.barrier = resolve_barrier(model, opts);

    struct Acc {
        SumAcc mass;
        std::vector<double> over_cum;
        std::vector<double> under_cum;
        std::vector<double> joint_cum;
        void merge(const Acc& o) {
            mass.merge(o.mass);
            auto add_into = [](std::vector<double>& dst, const std::vector<double>& src) {
                if (dst.size() < src.size()) dst.resize(src.size(), 0.0);
                for (size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
            };
            add_into(over_cum, o.over_cum);
            add_into(under_cum, o.under_cum);
            add_into(joint_cum, o.joint_cum);
        }
    };

    const size_t ny = overshoot_grid.size();
    const size_t nx = undershoot_grid.size();
    Acc acc = run_replications<Acc>(
        opts.n, opts.workers, [&](std::int64_t rep, Acc& a) {
            if (a.over_cum.empty()) {
                a.over_cum.resize(ny, 0.0);
                a.under_cum.resize(nx, 0.0);
                a.joint_cum.resize(nx * ny, 0.0);
            }
            RngStream rng(opts.seed, static_cast<std::uint64_t>(rep));
            const PassageOutcome out = first_passage_up(model, u, rng, popts);
            if (out.censored == CensorReason::Horizon) ++a.mass.censored;
            if (!out.crossed) {
                a.mass.add(0.0);
                return;
            }
            const double w = s > 0.0 ? std::exp(-s * out.tau) : 1.0;
            a.mass.add(w);
            const double over = out.overshoot(u);
            const double under = out.undershoot(u);
            for (size_t j = 0; j < ny; ++j)
                if (over <= overshoot_grid[j]) a.over_cum[j] += w;
            for (size_t i = 0; i < nx; ++i) {
                if (under > undershoot_grid[i]) continue;
                a.under_cum[i] += w;
                for (size_t j = 0; j < ny; ++j)
                    if (over <= overshoot_grid[j]) a.joint_cum[i * ny + j] += w;
            }
        });

    OverjumpEstimate est;
    est.total_mass =
        make_estimate(acc.mass.sum, acc.mass.sum_sq, acc.mass.n, acc.mass.censored, opts.seed);
    est.overshoot_grid = std::move(overshoot_grid);
    est.undershoot_grid = std::move(undershoot_grid);
    const double inv_n = 1.0 / static_cast<double>(std::max<std::int64_t>(1, opts.n));
    auto scale = [inv_n](std::vector<double>& v) {
        for (double& x : v) x *= inv_n;
    };
    est.overshoot_cum = std::move(acc.over_cum);
    est.undershoot_cum = std::move(acc.under_cum);
    est.joint_cum = std::move(acc.joint_cum);
    scale(est.overshoot_cum);
    scale(est.undershoot_cum);
    scale(est.joint_cum);
    return est;
}

DeficitEstimate estimate_total_deficit(const ValidatedModel& model, double u,
                                       std::vector<double> x_grid,
                                       const McOptions& opts) {
    if (model.stationary_drift() >= 0.0)
        throw std::invalid_argument(
            "estimate_total_deficit: requires negative stationary drift "
            "(the post-ruin supremum must be finite)");
    for (double x : x_grid)
        if (!(x > 0.0))
            throw std::invalid_argument("estimate_total_deficit: x-grid must be positive");
    std::sort(x_grid.begin(), x_grid.end());

    PassageOptions popts;
    popts.horizon = opts.horizon;
    popts.barrier = resolve_barrier(model, opts);

    struct Acc {
        SumAcc ruin;
        std::vector<double> cdf_sum;
        std::vector<double> cdf_sum_sq;
        void merge(const Acc& o) {
            ruin.merge(o.ruin);
            if (cdf_sum.size() < o.cdf_sum.size()) {
                cdf_sum.resize(o.cdf_sum.size(), 0.0);
                cdf_sum_sq.resize(o.cdf_sum_sq.size(), 0.0);
            }
            for (size_t i = 0; i < o.cdf_sum.size(); ++i) {
                cdf_sum[i] += o.cdf_sum[i];
                cdf_sum_sq[i] += o.cdf_sum_sq[i];
            }
        }
    };

    Acc acc = run_replications<Acc>(
        opts.n, opts.workers, [&](std::int64_t rep, Acc& a) {
            if (a.cdf_sum.empty()) {
                a.cdf_sum.resize(x_grid.size(), 0.0);
                a.cdf_sum_sq.resize(x_grid.size(), 0.0);
            }
            RngStream rng(opts.seed, static_cast<std::uint64_t>(rep));
            const PassageOutcome up = first_passage_up(model, u, rng, popts);
            if (up.censored == CensorReason::Horizon) ++a.ruin.censored;
            if (!up.crossed) {
                a.ruin.add(0.0);
                return;
            }
            a.ruin.add(1.0);
            // continue until the path falls a safe barrier below the running
            // post-ruin supremum; the supremum is then frozen
            double xi = up.value_after;
            double running_max = xi;
            int state = up.state;
            double t = up.tau;
            for (;;) {
                const EventRecord ev = step_event(model, state, rng);
                t += ev.dt;
                if (t > popts.horizon) {
                    ++a.ruin.censored;
                    break;
                }
                state = ev.state_after;
                if (ev.kind == EventKind::Claim) {
                    xi += ev.size;
                    running_max = std::max(running_max, xi);
                } else if (ev.kind == EventKind::Premium) {
                    xi -= ev.size;
                    if (xi <= running_max - popts.barrier) break;
                }
            }
            const double z = running_max - u;
            for (size_t i = 0; i < x_grid.size(); ++i) {
                const double ind = z < x_grid[i] ? 1.0 : 0.0;
                a.cdf_sum[i] += ind;
                a.cdf_sum_sq[i] += ind;
            }
        });

    DeficitEstimate est;
    est.ruin = make_estimate(acc.ruin.sum, acc.ruin.sum_sq, acc.ruin.n,
                             acc.ruin.censored, opts.seed);
    est.grid = std::move(x_grid);
    for (size_t i = 0; i < est.grid.size(); ++i)
        est.cdf.push_back(make_estimate(acc.cdf_sum[i], acc.cdf_sum_sq[i], acc.ruin.n,
                                        acc.ruin.censored, opts.seed));
    return est;
}

RecoveryEstimate estimate_recovery_red(const ValidatedModel& model, double u,
                                       double s, const McOptions& opts) {
    if (u < 0.0) throw std::invalid_argument("estimate_recovery_red: u must be >= 0");
    if (s < 0.0) throw std::invalid_argument("estimate_recovery_red: s must be >= 0");
    if (model.stationary_drift() >= 0.0)
        throw std::invalid_argument(
            "estimate_recovery_red: requires negative stationary drift");

    PassageOptions popts;
    popts.horizon = opts.horizon;
    popts.barrier = resolve_barrier(model, opts);

    struct Acc {
        SumAcc recovery;
        SumAcc red;
        void merge(const Acc& o) {
            recovery.merge(o.recovery);
            red.merge(o.red);
        }
    };

    Acc acc = run_replications<Acc>(
        opts.n, opts.workers, [&](std::int64_t rep, Acc& a) {
            RngStream rng(opts.seed, static_cast<std::uint64_t>(rep));
            const PassageOutcome up = first_passage_up(model, u, rng, popts);
            if (up.censored == CensorReason::Horizon) ++a.recovery.censored;
            if (!up.crossed) {
                a.recovery.add(0.0);
                a.red.add(0.0);
                return;
            }
            // recovery: first return of xi below u (a.s. finite, drift < 0)
            double xi = up.value_after;
            int state = up.state;
            double t = up.tau;
            bool recovered = false;
            while (!recovered) {
                const EventRecord ev = step_event(model, state, rng);
                t += ev.dt;
                if (t > popts.horizon) {
                    ++a.red.censored;
                    break;
                }
                state = ev.state_after;
                if (ev.kind == EventKind::Claim) {
                    xi += ev.size;
                } else if (ev.kind == EventKind::Premium) {
                    xi -= ev.size;
                    if (xi < u) recovered = true;
                }
            }
            if (!recovered) {
                a.recovery.add(0.0);
                a.red.add(0.0);
                return;
            }
            const double tau_prime = t;
            const double red_period = tau_prime - up.tau;
            a.recovery.add(std::exp(-s * tau_prime));
            a.red.add(std::exp(-s * red_period));
        });

    RecoveryEstimate est;
    est.recovery = make_estimate(acc.recovery.sum, acc.recovery.sum_sq, acc.recovery.n,
                                 acc.recovery.censored, opts.seed);
    est.red_period =
        make_estimate(acc.red.sum, acc.red.sum_sq, acc.red.n, acc.red.censored, opts.seed);
    return est;
}

IntervalExitEstimate estimate_interval_exit(const ValidatedModel& model, double u,
                                            double b, const McOptions& opts) {
    PassageOptions popts;
    popts.horizon = opts.horizon;

    struct Acc {
        SumAcc low;
        SumAcc high;
        double low_overshoot_sum = 0.0;
        double low_overshoot_sq = 0.0;
        std::int64_t low_count = 0;
        void merge(const Acc& o) {
            low.merge(o.low);
            high.merge(o.high);
            low_overshoot_sum += o.low_overshoot_sum;
            low_overshoot_sq += o.low_overshoot_sq;
            low_count += o.low_count;
        }
    };

    Acc acc = run_replications<Acc>(
        opts.n, opts.workers, [&](std::int64_t rep, Acc& a) {
            RngStream rng(opts.seed, static_cast<std::uint64_t>(rep));
            const IntervalExitOutcome out = interval_exit(model, u, b, rng, popts);
            if (out.side == ExitSide::Censored) {
                ++a.low.censored;
                a.low.add(0.0);
                a.high.add(0.0);
                return;
            }
            a.low.add(out.side == ExitSide::Low ? 1.0 : 0.0);
            a.high.add(out.side == ExitSide::High ? 1.0 : 0.0);
            if (out.side == ExitSide::Low) {
                a.low_overshoot_sum += out.overshoot;
                a.low_overshoot_sq += out.overshoot * out.overshoot;
                ++a.low_count;
            }
        });

    IntervalExitEstimate est;
    est.p_low = make_estimate(acc.low.sum, acc.low.sum_sq, acc.low.n, acc.low.censored,
                              opts.seed);
    est.p_high = make_estimate(acc.high.sum, acc.high.sum_sq, acc.high.n,
                               acc.low.censored, opts.seed);
    est.low_overshoot_mean = make_estimate(acc.low_overshoot_sum, acc.low_overshoot_sq,
                                           acc.low_count, 0, opts.seed);
    est.censored_frac = est.p_low.censored_frac;
    return est;
}

MCEstimate estimate_modified_ruin(const ValidatedModel& model,
                                  const ValidatedModel& model_star, double u,
                                  double a, double b, const McOptions& opts) {
    const auto issues = check_modified_pair(model, model_star);
    if (!issues.empty()) throw ValidationError(issues);
    if ((model.stationary_drift() >= 0.0 || model_star.stationary_drift() >= 0.0) &&
        !std::isfinite(opts.horizon) && !opts.barrier.has_value())
        throw std::invalid_argument(
            "estimate_modified_ruin: non-negative drift in a regime; set an "
            "explicit horizon or barrier");

    ModifiedOptions mopts;
    mopts.horizon = opts.horizon;
    mopts.barrier = resolve_barrier(model_star, opts);

    SumAcc acc = run_replications<SumAcc>(
        opts.n, opts.workers, [&](std::int64_t rep, SumAcc& acc_local) {
            RngStream rng(opts.seed, static_cast<std::uint64_t>(rep));
            const ModifiedOutcome out =
                simulate_modified(model, model_star, u, a, b, rng, mopts);
            acc_local.add(out.ruined ? 1.0 : 0.0);
            if (out.censored == CensorReason::Horizon) ++acc_local.censored;
        });
    return make_estimate(acc.sum, acc.sum_sq, acc.n, acc.censored, opts.seed);
}

} // namespace ruinlab
