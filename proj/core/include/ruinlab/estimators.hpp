// SPDX-License-Identifier: Apache-2.0

#ifndef RUINLAB_ESTIMATORS_HPP
#define RUINLAB_ESTIMATORS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "ruinlab/simulate.hpp"

namespace ruinlab {

/// Documented default master seed; override per run or via RUINLAB_SEED.
inline constexpr std::uint64_t kDefaultSeed = 42424242ull;

struct MCEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::int64_t n = 0;
    double censored_frac = 0.0;
    std::uint64_t seed = 0;
    bool variance_warning = false;
};

struct McOptions {
    std::int64_t n = 1'000'000;
    std::uint64_t seed = kDefaultSeed;
    int workers = 0;  // 0 = hardware
    double horizon = std::numeric_limits<double>::infinity();
    /// Safe-barrier width L; unset = derive from the smallest Lundberg root so
    /// that the censoring bias bound exp(-r1 L) < 1e-8.
    std::optional<double> barrier;
};

/// Barrier width used when opts.barrier is unset: 25 / r_min where r_min is
/// the smallest positive Lundberg root (for m > 1, of the stationary-mixture
/// cumulant — a documented heuristic, reported here).
struct CensoringPlan {
    double barrier = 0.0;
    double decay_rate = 0.0;   // r used in the bound
    double bias_bound = 0.0;   // exp(-r * barrier)
};
CensoringPlan censoring_plan(const ValidatedModel& model,
                             const McOptions& opts);

/// P{tau+(u) < infinity}. Requires negative stationary drift unless an
/// explicit horizon is set.
MCEstimate estimate_ruin(const ValidatedModel& model, double u,
                         const McOptions& opts = {});

/// Weighted empirical joint law of (undershoot gamma_+(u), overshoot
/// gamma^+(u)) with weights exp(-s tau+): total mass, cumulative marginals,
/// and the joint cumulative mass on the product grid.
struct OverjumpEstimate {
    MCEstimate total_mass;
    std::vector<double> overshoot_grid;
    std::vector<double> overshoot_cum;   // weighted mass with overshoot <= y
    std::vector<double> undershoot_grid;
    std::vector<double> undershoot_cum;
    /// joint_cum[i * overshoot_grid.size() + j] =
    ///   weighted mass with undershoot <= x_i and overshoot <= y_j
    std::vector<double> joint_cum;
};
OverjumpEstimate estimate_overjump(const ValidatedModel& model, double u, double s,
                                   std::vector<double> overshoot_grid,
                                   std::vector<double> undershoot_grid,
                                   const McOptions& opts = {});

/// P{z+(u) < x, tau+(u) < infinity} on an x-grid; z+(u) is the post-ruin
/// supremum minus u. Requires negative stationary drift.
struct DeficitEstimate {
    std::vector<double> grid;
    std::vector<MCEstimate> cdf;
    MCEstimate ruin;  // limit x -> infinity, same replications
};
DeficitEstimate estimate_total_deficit(const ValidatedModel& model, double u,
                                       std::vector<double> x_grid,
                                       const McOptions& opts = {});

/// (E[e^{-s tau'(u)}; tau' < inf], E[e^{-s T'(u)}; T' < inf]) where tau' is
/// the recovery time (first return below u after ruin) and T' = tau' - tau+.
struct RecoveryEstimate {
    MCEstimate recovery;    // discounted recovery time
    MCEstimate red_period;  // discounted red-period length
};
RecoveryEstimate estimate_recovery_red(const ValidatedModel& model, double u,
                                       double s, const McOptions& opts = {});

struct IntervalExitEstimate {
    MCEstimate p_low;           // P(A-)
    MCEstimate p_high;          // P(A+)
    MCEstimate low_overshoot_mean;
    double censored_frac = 0.0;
};
IntervalExitEstimate estimate_interval_exit(const ValidatedModel& model, double u,
                                            double b, const McOptions& opts = {});

/// Ruin probability of the modified two-regime process.
MCEstimate estimate_modified_ruin(const ValidatedModel& model,
                                  const ValidatedModel& model_star, double u,
                                  double a, double b, const McOptions& opts = {});

MCEstimate make_estimate(double sum, double sum_sq, std::int64_t n,
                         std::int64_t censored, std::uint64_t seed);

} // namespace ruinlab

#endif
