// SPDX-License-Identifier: Apache-2.0

#include "ruinlab/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace ruinlab {

namespace {

double sample_claim(const ClaimLaw& law, RngStream& rng) {
    switch (law.kind) {
        case ClaimLaw::Kind::Exponential:
            return rng.next_exponential(law.rate);
        case ClaimLaw::Kind::Erlang: {
            double s = 0.0;
            for (int i = 0; i < law.shape; ++i) s += rng.next_exponential(law.rate);
            return s;
        }
        case ClaimLaw::Kind::HyperExponential: {
            const double pick = rng.next_uniform();
            double acc = 0.0;
            size_t idx = law.weights.size() - 1;
            for (size_t i = 0; i < law.weights.size(); ++i) {
                acc += law.weights[i];
                if (pick <= acc) {
                    idx = i;
                    break;
                }
            }
            return rng.next_exponential(law.rates[idx]);
        }
    }
    throw std::logic_error("unreachable claim kind");
}

int sample_switch_target(const ValidatedModel& model, int state, RngStream& rng) {
    const Eigen::MatrixXd& q = model.generator();
    const int m = model.state_count();
    const double out = std::abs(q(state, state));
    const double pick = rng.next_uniform() * out;
    double acc = 0.0;
    int target = -1;
    for (int j = 0; j < m; ++j) {
        if (j == state) continue;
        acc += q(state, j);
        if (pick <= acc) {
            target = j;
            break;
        }
    }
    if (target < 0) {
        // numeric edge: fall back to the last state with positive rate
        for (int j = m - 1; j >= 0; --j)
            if (j != state && q(state, j) > 0.0) return j;
        throw std::logic_error("chain switch with no outgoing rate");
    }
    return target;
}

} // namespace

EventRecord step_event(const ValidatedModel& model, int state, RngStream& rng) {
    if (state < 0 || state >= model.state_count())
        throw std::out_of_range("step_event: invalid state index");
    const StateParams& p = model.state(state);
    const double qout = std::abs(model.generator()(state, state));
    const double total = p.lambda1 + p.lambda2 + qout;
    if (!(total > 0.0))
        throw std::domain_error("step_event: frozen state (total rate 0)");

    EventRecord ev;
    ev.state_before = state;
    ev.state_after = state;
    ev.dt = rng.next_exponential(total);

    const double pick = rng.next_uniform() * total;
    // tie-break priority on exact boundaries: claim > premium > switch
    if (pick <= p.lambda2) {
        ev.kind = EventKind::Claim;
        ev.size = sample_claim(p.claim, rng);
    } else if (pick <= p.lambda2 + p.lambda1) {
        ev.kind = EventKind::Premium;
        ev.size = rng.next_exponential(p.c);
    } else {
        ev.kind = EventKind::ChainSwitch;
        ev.size = 0.0;
        ev.state_after = sample_switch_target(model, state, rng);
    }
    return ev;
}

PathExtrema path_extrema(const std::vector<EventRecord>& log, double t) {
    PathExtrema ex;
    double xi = 0.0, clock = 0.0;
    for (const EventRecord& ev : log) {
        clock += ev.dt;
        if (clock > t) break;
        if (ev.kind == EventKind::Claim) xi += ev.size;
        else if (ev.kind == EventKind::Premium) xi -= ev.size;
        ex.sup = std::max(ex.sup, xi);
        ex.inf = std::min(ex.inf, xi);
    }
    ex.drawdown = xi - ex.sup;
    return ex;
}

PassageOutcome first_passage_up(const ValidatedModel& model, double u,
                                RngStream& rng, const PassageOptions& opts) {
    if (u < 0.0) throw std::invalid_argument("first_passage_up: u must be >= 0");
    PassageOutcome out;
    double xi = 0.0, t = 0.0;
    int state = opts.initial_state;
    const double floor = u - opts.barrier;
    for (;;) {
        const EventRecord ev = step_event(model, state, rng);
        t += ev.dt;
        if (t > opts.horizon) {
            out.censored = CensorReason::Horizon;
            out.tau = opts.horizon;
            out.state = state;
            return out;
        }
        state = ev.state_after;
        if (ev.kind == EventKind::Claim) {
            const double next = xi + ev.size;
            if (next > u) {
                out.crossed = true;
                out.tau = t;
                out.value_before = xi;
                out.value_after = next;
                out.state = state;
                return out;
            }
            xi = next;
        } else if (ev.kind == EventKind::Premium) {
            xi -= ev.size;
            if (xi <= floor) {
                out.censored = CensorReason::Barrier;
                out.tau = t;
                out.state = state;
                out.value_after = xi;
                return out;
            }
        }
    }
}

PassageOutcome first_passage_down(const ValidatedModel& model, double x,
                                  RngStream& rng, const PassageOptions& opts) {
    PassageOutcome out;
    if (x > 0.0) {
        out.crossed = true;
        out.tau = 0.0;
        out.value_before = 0.0;
        out.value_after = 0.0;
        out.state = opts.initial_state;
        return out;
    }
    double xi = 0.0, t = 0.0;
    int state = opts.initial_state;
    const double ceiling = x + opts.barrier;
    for (;;) {
        const EventRecord ev = step_event(model, state, rng);
        t += ev.dt;
        if (t > opts.horizon) {
            out.censored = CensorReason::Horizon;
            out.tau = opts.horizon;
            out.state = state;
            return out;
        }
        state = ev.state_after;
        if (ev.kind == EventKind::Premium) {
            const double next = xi - ev.size;
            if (next < x) {
                out.crossed = true;
                out.tau = t;
                out.value_before = xi;
                out.value_after = next;
                out.state = state;
                return out;
            }
            xi = next;
        } else if (ev.kind == EventKind::Claim) {
            xi += ev.size;
            if (xi >= ceiling) {
                out.censored = CensorReason::Barrier;
                out.tau = t;
                out.state = state;
                out.value_after = xi;
                return out;
            }
        }
    }
}

IntervalExitOutcome interval_exit(const ValidatedModel& model, double u, double b,
                                  RngStream& rng, const PassageOptions& opts) {
    if (!(u > 0.0)) throw std::invalid_argument("interval_exit: requires u > 0");
    if (u > b) throw std::invalid_argument("interval_exit: requires u <= b");
    IntervalExitOutcome out;
    out.state = opts.initial_state;
    const double low = u - b;
    if (u == b) {
        // start point sits on the lower boundary: immediate low exit
        out.side = ExitSide::Low;
        out.tau = 0.0;
        return out;
    }
    double xi = 0.0, t = 0.0;
    int state = opts.initial_state;
    for (;;) {
        const EventRecord ev = step_event(model, state, rng);
        t += ev.dt;
        if (t > opts.horizon) {
            out.side = ExitSide::Censored;
            out.tau = opts.horizon;
            out.state = state;
            return out;
        }
        state = ev.state_after;
        if (ev.kind == EventKind::Claim) {
            const double next = xi + ev.size;
            if (next >= u) {
                out.side = ExitSide::High;
                out.tau = t;
                out.overshoot = next - u;
                out.undershoot = u - xi;
                out.state = state;
                return out;
            }
            xi = next;
        } else if (ev.kind == EventKind::Premium) {
            const double next = xi - ev.size;
            if (next <= low) {
                out.side = ExitSide::Low;
                out.tau = t;
                out.overshoot = low - next;
                out.undershoot = xi - low;
                out.state = state;
                return out;
            }
            xi = next;
        }
    }
}

std::vector<ValidationIssue> check_modified_pair(const ValidatedModel& model,
                                                 const ValidatedModel& model_star) {
    std::vector<ValidationIssue> issues;
    auto add = [&](std::string code, std::string message) {
        issues.push_back(ValidationIssue{std::move(code), std::move(message)});
    };
    if (model.state_count() != model_star.state_count()) {
        add("pair.states", "model and model_star have different state counts");
        return issues;
    }
    if (!model.generator().isApprox(model_star.generator(), 0.0) &&
        (model.generator() - model_star.generator()).cwiseAbs().maxCoeff() > 0.0)
        add("pair.chain", "model and model_star must share the generator Q");
    for (int k = 0; k < model.state_count(); ++k) {
        const StateParams& p = model.state(k);
        const StateParams& q = model_star.state(k);
        const std::string at = "state " + std::to_string(k + 1);
        if (p.lambda1 != q.lambda1) add("pair.lambda1", at + ": lambda1 differs");
        if (p.lambda2 != q.lambda2) add("pair.lambda2", at + ": lambda2 differs");
        const auto ca = p.claim.components();
        const auto cb = q.claim.components();
        bool same = ca.size() == cb.size();
        if (same)
            for (size_t i = 0; i < ca.size(); ++i)
                same = same && ca[i].weight == cb[i].weight &&
                       ca[i].shape == cb[i].shape && ca[i].rate == cb[i].rate;
        if (!same)
            add("pair.claim", at + ": claim law differs (only c may change)");
    }
    return issues;
}

ModifiedOutcome simulate_modified(const ValidatedModel& model,
                                  const ValidatedModel& model_star, double u,
                                  double a, double b, RngStream& rng,
                                  const ModifiedOptions& opts) {
    if (!(a > 0.0) || a > b) throw std::invalid_argument("simulate_modified: requires 0 < a <= b");
    if (!(u > 0.0)) throw std::invalid_argument("simulate_modified: requires u > 0");

    ModifiedOutcome out;
    double xi = 0.0, t = 0.0;
    int state = opts.initial_state;
    const double lower_switch = u - b;  // go strictly below -> reduced regime
    const double upper_switch = u - a;  // come back to >= -> normal regime
    bool reduced = 0.0 < lower_switch;  // u > b: the path starts below u - b
    const double floor = lower_switch - opts.barrier;

    for (;;) {
        const ValidatedModel& active = reduced ? model_star : model;
        const EventRecord ev = step_event(active, state, rng);
        t += ev.dt;
        if (t > opts.horizon) {
            out.censored = CensorReason::Horizon;
            out.tau = opts.horizon;
            out.state = state;
            return out;
        }
        state = ev.state_after;
        if (ev.kind == EventKind::Claim) {
            const double next = xi + ev.size;
            if (next > u) {
                out.ruined = true;
                out.tau = t;
                out.value_before = xi;
                out.value_after = next;
                out.state = state;
                return out;
            }
            xi = next;
            if (reduced && xi >= upper_switch) {
                reduced = false;
                if (opts.record_switches) out.switches.push_back({t, false});
            }
        } else if (ev.kind == EventKind::Premium) {
            xi -= ev.size;
            if (!reduced && xi < lower_switch) {
                reduced = true;
                if (opts.record_switches) out.switches.push_back({t, true});
            }
            if (xi <= floor) {
                out.censored = CensorReason::Barrier;
                out.tau = t;
                out.state = state;
                out.value_after = xi;
                return out;
            }
        }
    }
}

} // namespace ruinlab
