// SPDX-License-Identifier: Apache-2.0

#ifndef RUINLAB_SIMULATE_HPP
#define RUINLAB_SIMULATE_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "ruinlab/model.hpp"
#include "ruinlab/rng.hpp"

namespace ruinlab {

enum class EventKind { Premium, Claim, ChainSwitch };

/// One jump of the event-driven path. `dt` is the exponential holding time
/// since the previous event; `size` is the jump magnitude of xi (premiums move
/// xi down, claims up, chain switches leave xi unchanged).
struct EventRecord {
    double dt = 0.0;
    EventKind kind = EventKind::Premium;
    double size = 0.0;
    int state_before = 0;
    int state_after = 0;
};

/// Draw the next event out of state `state`: holding time ~ Exp(total rate),
/// kind chosen proportionally to (lambda1, lambda2, |q_kk|), size from the
/// state's laws. Throws std::domain_error when the state is frozen (total
/// rate 0).
EventRecord step_event(const ValidatedModel& model, int state, RngStream& rng);

/// Running extrema of the piecewise-constant path over [0, t]:
/// (sup, inf, xi(t) - sup). The log must cover [0, t] (events after t are
/// ignored; xi(0) = 0).
struct PathExtrema {
    double sup = 0.0;
    double inf = 0.0;
    double drawdown = 0.0;  // xi(t) - sup_{[0,t]} xi
};
PathExtrema path_extrema(const std::vector<EventRecord>& log, double t);

enum class CensorReason { None, Horizon, Barrier };

struct PassageOutcome {
    bool crossed = false;
    double tau = 0.0;
    double value_before = 0.0;   // xi just before the crossing jump
    double value_after = 0.0;    // xi at the crossing
    int state = 0;               // chain state at crossing (or at censoring)
    CensorReason censored = CensorReason::None;

    double overshoot(double level) const { return value_after - level; }
    double undershoot(double level) const { return level - value_before; }
};

struct PassageOptions {
    double horizon = std::numeric_limits<double>::infinity();
    /// Give up (declare "never crosses") once xi <= level - barrier for the
    /// upward problem, or xi >= level + barrier for the downward one.
    double barrier = std::numeric_limits<double>::infinity();
    int initial_state = 0;
};

/// tau+(u) = inf{t : xi(t) > u}, u >= 0. Crossings happen at claim jumps only;
/// detection is exact. Censoring is an outcome, not an error.
PassageOutcome first_passage_up(const ValidatedModel& model, double u,
                                RngStream& rng, const PassageOptions& opts = {});

/// tau-(x) = inf{t : xi(t) < x} for x <= 0; for x > 0 the passage is immediate
/// (tau = 0, no overshoot).
PassageOutcome first_passage_down(const ValidatedModel& model, double x,
                                  RngStream& rng, const PassageOptions& opts = {});

enum class ExitSide { High, Low, Censored };

struct IntervalExitOutcome {
    ExitSide side = ExitSide::Censored;
    double tau = 0.0;
    double overshoot = 0.0;   // beyond the crossed boundary
    double undershoot = 0.0;  // gap to the boundary just before crossing
    int state = 0;
};

/// Exit time of xi from the open interval (u - b, u), started at 0. Requires
/// 0 < u <= b; u == b starts on the lower boundary and exits low immediately
/// with tau = 0.
IntervalExitOutcome interval_exit(const ValidatedModel& model, double u, double b,
                                  RngStream& rng, const PassageOptions& opts = {});

struct RegimeSwitch {
    double t = 0.0;
    bool to_reduced = false;
};

struct ModifiedOutcome {
    bool ruined = false;
    double tau = 0.0;          // passage time above u
    double value_before = 0.0;
    double value_after = 0.0;
    int state = 0;
    CensorReason censored = CensorReason::None;
    std::vector<RegimeSwitch> switches;

    double overshoot(double u) const { return value_after - u; }
    double undershoot(double u) const { return u - value_before; }
};

struct ModifiedOptions {
    double horizon = std::numeric_limits<double>::infinity();
    double barrier = std::numeric_limits<double>::infinity();  // below u - b
    int initial_state = 0;
    bool record_switches = false;
};

/// Two-regime path: increments follow `model` until xi first goes strictly
/// below u - b, then `model_star` until xi comes back to >= u - a, and so on;
/// ruin when xi exceeds u. For u > b the path starts below u - b and hence in
/// the reduced regime. Requires 0 < a <= b, u > 0, and the two models to
/// differ only in the per-state premium parameter c.
ModifiedOutcome simulate_modified(const ValidatedModel& model,
                                  const ValidatedModel& model_star, double u,
                                  double a, double b, RngStream& rng,
                                  const ModifiedOptions& opts = {});

/// Check that `model_star` differs from `model` only in per-state c.
/// Returns issues (empty when compatible).
std::vector<ValidationIssue> check_modified_pair(const ValidatedModel& model,
                                                 const ValidatedModel& model_star);

} // namespace ruinlab

#endif
