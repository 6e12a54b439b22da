// SPDX-License-Identifier: Apache-2.0

#ifndef RUINLAB_ANALYTIC_HPP
#define RUINLAB_ANALYTIC_HPP

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "ruinlab/exppoly.hpp"
#include "ruinlab/model.hpp"

namespace ruinlab {

/// Positive simple roots of the Lundberg equation psi(alpha) = s, sorted
/// ascending, plus the full root multiset of the cleared polynomial for
/// diagnostics. Scalar rational models only; only s = 0 is supported.
struct LundbergRoots {
    std::vector<double> roots;
    std::vector<std::complex<double>> all_roots;
};
LundbergRoots lundberg_roots(const ValidatedModel& model, double s = 0.0);

/// Law with an atom at 0 and a signed exponential-mixture tail:
///   P{law < u} = 1 - sum_i weight_i exp(-rate_i u)  for u > 0.
struct ExpMixtureLaw {
    double atom = 1.0;  // 1 - sum weights
    std::vector<double> weights;
    std::vector<double> rates;

    double cdf(double u) const;
    double tail(double u) const;  // P{law > u} for u >= 0
};

/// Distribution of the all-time supremum xi^+ via the rational Wiener-Hopf
/// factorization: tail weights are the partial-fraction residues of
/// c|drift| alpha / (-psi(alpha)(alpha+c)) at the Lundberg roots. Requires
/// m = 1, negative drift, simple roots.
ExpMixtureLaw sup_law(const ValidatedModel& model);

/// Exit-through-the-bottom curve for the interval (u-b, u):
///   B_b(u) = (1 - sum n_i e^{-r_i u}) / (1 - sum d_i e^{-r_i b}).
/// Coefficients are independent of u and b.
struct ExitLowCurve {
    std::vector<double> rates;        // Lundberg roots r_i
    std::vector<double> numerator;    // n_i
    std::vector<double> denominator;  // d_i
    bool used_collocation_fallback = false;

    double value(double u, double b) const;
};
ExitLowCurve exit_low_curve(const ValidatedModel& model);
/// Probability of exiting (u-b, u) through the lower boundary, 0 < u <= b.
double exit_low(const ValidatedModel& model, double u, double b);

/// Renewal measure of the ascending ladder structure: atom at 0+ equal to
/// 1/(lambda1+lambda2) plus density dP_+(x) / (c |drift|).
struct RenewalMeasure {
    double atom = 0.0;
    double density_scale = 0.0;
    ExpMixtureLaw sup;  // P_+ whose density is being rescaled

    double continuous_mass() const;  // density_scale * (1 - atom of sup)
};
RenewalMeasure renewal_measure(const ValidatedModel& model);

/// Overshoot law g(dy/u): density of
///   E[gamma^+(u) in dy, tau+(u) < infinity]
/// for a scalar negative-drift model. Closed form in the Erlang family.
class OvershootLaw {
public:
    explicit OvershootLaw(const ValidatedModel& model);

    double density(double u, double y) const;
    /// Mass of overshoots <= y given ruin: integral_0^y g(dv/u).
    double cumulative(double u, double y) const;
    /// Total mass = P{tau+(u) < infinity}.
    double total_mass(double u) const;

    /// Density in y as an ExpPoly, for exact downstream integration.
    ExpPoly density_in_y(double u) const;

    double renewal_atom() const { return renewal_atom_; }

private:
    friend double modified_ruin(const ValidatedModel&, const ValidatedModel&,
                                double, double, double);
    double renewal_atom_ = 0.0;            // M(0+)
    std::vector<double> ladder_coefs_;     // a_i r_i / (c |d|)
    std::vector<double> rates_;            // Lundberg roots
    ExpPoly kernel_;                       // K(w) = pi(w) + c * Pi_bar(w)
    std::vector<ExpPoly> kernel_prims_;    // G_i = antiderivative of e^{r_i w} K(w)
};

/// Ruin probability of the modified two-regime process (scalar case), by the
/// renewal decomposition over regime cycles; exact for the Erlang family.
/// Requires 0 < a <= b, u > 0, both drifts negative.
double modified_ruin(const ValidatedModel& model, const ValidatedModel& model_star,
                     double u, double a, double b);

/// Substochastic fixed-point atoms of the infimum/reflected-infimum at s = 0,
/// with R_-(0) = C p_-(0) and R^-(0) = p^-(0) C.
struct MatrixAtoms {
    Eigen::MatrixXd p_minus;        // p_-(0)
    Eigen::MatrixXd p_upper_minus;  // p^-(0)
    Eigen::MatrixXd r_minus;        // C p_-(0)
    Eigen::MatrixXd r_upper_minus;  // p^-(0) C
    double residual_p_minus = 0.0;
    double residual_p_upper_minus = 0.0;
    int iterations = 0;
};
MatrixAtoms fixed_point_atoms(const ValidatedModel& model);

/// Resolvent P_s = s (sI - Q)^{-1}; stochastic for any generator and s > 0.
Eigen::MatrixXd resolvent(const ChainSpec& chain, double s);

/// Matrix of downward-passage probabilities
///   P{tau-(x) < inf, chain state at passage} = q_-(0) exp(R_-(0) x), x <= 0.
Eigen::MatrixXd passage_probability_down(const ValidatedModel& model, double x,
                                         const MatrixAtoms& atoms);
Eigen::MatrixXd passage_probability_down(const ValidatedModel& model, double x);

/// Smallest positive root of the stationary-mixture cumulant
/// sum_k pi_k psi_k(alpha); used for barrier sizing on matrix models.
double smallest_positive_mixture_root(const ValidatedModel& model);

namespace detail {
/// Least-squares collocation fallback for the exit-low coefficients (used when
/// the vanishing-residual system is singular); exposed for validation.
ExitLowCurve exit_low_collocation(const ValidatedModel& model, double b);
} // namespace detail

} // namespace ruinlab

#endif
