// SPDX-License-Identifier: Apache-2.0

#include "ruinlab/analytic.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace ruinlab {

namespace {

// ---------------------------------------------------------------------------
// Small dense polynomials, coefficients ascending in degree.

using Poly = std::vector<double>;

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

void poly_add_scaled(Poly& a, const Poly& b, double s) {
    if (a.size() < b.size()) a.resize(b.size(), 0.0);
    for (size_t i = 0; i < b.size(); ++i) a[i] += s * b[i];
}

double poly_eval(const Poly& p, double x) {
    double v = 0.0;
    for (size_t i = p.size(); i-- > 0;) v = v * x + p[i];
    return v;
}

Poly poly_derivative(const Poly& p) {
    if (p.size() <= 1) return {0.0};
    Poly d(p.size() - 1);
    for (size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
    return d;
}

void poly_trim(Poly& p) {
    double max_abs = 0.0;
    for (double c : p) max_abs = std::max(max_abs, std::abs(c));
    while (p.size() > 1 && std::abs(p.back()) <= 1e-14 * max_abs) p.pop_back();
}

std::vector<std::complex<double>> poly_roots(Poly p) {
    poly_trim(p);
    const int deg = static_cast<int>(p.size()) - 1;
    if (deg < 1) return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -p[static_cast<size_t>(i)] / p.back();
    for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> roots(static_cast<size_t>(deg));
    for (int i = 0; i < deg; ++i) roots[static_cast<size_t>(i)] = es.eigenvalues()(i);
    return roots;
}

// ---------------------------------------------------------------------------
// Rational structure of the scalar cumulant.

struct ScalarRational {
    double lambda1 = 0.0, lambda2 = 0.0, c = 1.0;
    double drift = 0.0;
    std::vector<ClaimLaw::Component> components;
    int phases = 0;     // sum of claim shapes
    Poly q_claim;       // prod (rate - alpha)^shape, the claim MGF denominator
    Poly p1;            // cleared cumulant divided by alpha; Lundberg roots are
                        // the positive zeros of p1
};

const StateParams& require_scalar(const ValidatedModel& model, const char* what) {
    if (!model.is_scalar())
        throw std::invalid_argument(std::string(what) + ": scalar (m = 1) models only");
    return model.state(0);
}

ScalarRational scalar_rational(const ValidatedModel& model, const char* what) {
    const StateParams& p = require_scalar(model, what);
    ScalarRational r;
    r.lambda1 = p.lambda1;
    r.lambda2 = p.lambda2;
    r.c = p.c;
    r.drift = model.state_drift(0);
    r.components = p.claim.components();
    r.phases = 0;
    for (const auto& comp : r.components) r.phases += comp.shape;

    r.q_claim = {1.0};
    for (const auto& comp : r.components)
        for (int i = 0; i < comp.shape; ++i)
            r.q_claim = poly_mul(r.q_claim, Poly{comp.rate, -1.0});

    // numerator of MGF - 1 over q_claim, then divide by alpha (exact root at 0)
    Poly numer(r.q_claim.size(), 0.0);
    poly_add_scaled(numer, r.q_claim, -1.0);
    for (size_t i = 0; i < r.components.size(); ++i) {
        Poly rest{1.0};
        for (size_t j = 0; j < r.components.size(); ++j) {
            if (j == i) continue;
            for (int k = 0; k < r.components[j].shape; ++k)
                rest = poly_mul(rest, Poly{r.components[j].rate, -1.0});
        }
        poly_add_scaled(numer, rest,
                        r.components[i].weight *
                            std::pow(r.components[i].rate, r.components[i].shape));
    }
    double max_abs = 0.0;
    for (double cf : numer) max_abs = std::max(max_abs, std::abs(cf));
    if (std::abs(numer[0]) > 1e-9 * std::max(1.0, max_abs))
        throw std::logic_error("cumulant numerator must vanish at 0");
    Poly ratio(numer.begin() + 1, numer.end());  // (MGF-1)*q_claim / alpha

    // p1 = -lambda1 * q_claim + lambda2 * (c + alpha) * ratio
    Poly p1;
    poly_add_scaled(p1, r.q_claim, -r.lambda1);
    if (r.lambda2 > 0.0)
        poly_add_scaled(p1, poly_mul(Poly{r.c, 1.0}, ratio), r.lambda2);
    poly_trim(p1);
    r.p1 = std::move(p1);
    return r;
}

} // namespace

// ---------------------------------------------------------------------------
// Lundberg roots

LundbergRoots lundberg_roots(const ValidatedModel& model, double s) {
    if (s != 0.0)
        throw std::invalid_argument("lundberg_roots: only s = 0 is supported");
    const StateParams& p = require_scalar(model, "lundberg_roots");
    LundbergRoots out;
    if (p.lambda2 <= 0.0) return out;  // psi has no positive zero without claims

    const ScalarRational sr = scalar_rational(model, "lundberg_roots");
    out.all_roots = poly_roots(sr.p1);

    double scale = 0.0;
    for (const auto& z : out.all_roots) scale = std::max(scale, std::abs(z));
    scale = std::max(scale, 1.0);

    std::vector<double> candidates;
    for (const auto& z : out.all_roots) {
        if (std::abs(z.imag()) > 1e-7 * scale) continue;
        if (z.real() <= 1e-12 * scale) continue;
        candidates.push_back(z.real());
    }
    std::sort(candidates.begin(), candidates.end());

    for (double root : candidates) {
        // polish on the exact rational cumulant
        double x = root;
        for (int it = 0; it < 60; ++it) {
            const double f = state_cumulant(p, x);
            const double df = state_cumulant_derivative(p, x);
            if (std::abs(df) < 1e-14) break;
            const double step = f / df;
            x -= step;
            if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
        }
        if (!(x > 0.0)) continue;
        if (std::abs(state_cumulant(p, x)) > 1e-9 * std::max(1.0, p.lambda1 + p.lambda2))
            throw std::runtime_error("lundberg_roots: polishing failed to converge");
        if (!out.roots.empty() &&
            std::abs(x - out.roots.back()) <= 1e-7 * std::max(1.0, std::abs(x)))
            throw std::runtime_error(
                "lundberg_roots: multiple (non-simple) root detected; unsupported model");
        out.roots.push_back(x);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Supremum law (rational Wiener-Hopf factorization)

double ExpMixtureLaw::cdf(double u) const {
    if (u <= 0.0) return 0.0;
    return 1.0 - tail(u);
}

double ExpMixtureLaw::tail(double u) const {
    double t = 0.0;
    for (size_t i = 0; i < weights.size(); ++i)
        t += weights[i] * std::exp(-rates[i] * u);
    return t;
}

ExpMixtureLaw sup_law(const ValidatedModel& model) {
    const ScalarRational sr = scalar_rational(model, "sup_law");
    if (!(sr.drift < 0.0))
        throw std::invalid_argument("sup_law: requires negative drift");

    ExpMixtureLaw law;
    if (sr.lambda2 <= 0.0) {
        law.atom = 1.0;  // no upward jumps: the supremum is identically 0
        return law;
    }

    const LundbergRoots roots = lundberg_roots(model);
    if (static_cast<int>(roots.roots.size()) != sr.phases)
        throw std::runtime_error(
            "sup_law: expected " + std::to_string(sr.phases) +
            " positive Lundberg roots, found " + std::to_string(roots.roots.size()));

    // E e^{alpha xi+} = c|d| q_claim(alpha) / (-p1(alpha)); the tail weight at
    // root r_i is minus the residue over r_i.
    const Poly dp1 = poly_derivative(sr.p1);
    const double scale = sr.c * std::abs(sr.drift);
    double wsum = 0.0;
    for (double r : roots.roots) {
        const double w = scale * poly_eval(sr.q_claim, r) / (poly_eval(dp1, r) * r);
        law.weights.push_back(w);
        law.rates.push_back(r);
        wsum += w;
    }
    law.atom = 1.0 - wsum;
    if (law.atom < -1e-9 || law.atom > 1.0 + 1e-9)
        throw std::runtime_error("sup_law: factorization produced an invalid atom");
    return law;
}

// ---------------------------------------------------------------------------
// Exit-low curve

double ExitLowCurve::value(double u, double b) const {
    double num = 1.0, den = 1.0;
    for (size_t i = 0; i < rates.size(); ++i) {
        num -= numerator[i] * std::exp(-rates[i] * u);
        den -= denominator[i] * std::exp(-rates[i] * b);
    }
    return num / den;
}

namespace {

ExitLowCurve exit_low_from_ratios(const ScalarRational& sr,
                                  const std::vector<double>& roots,
                                  const Eigen::VectorXd& chat) {
    ExitLowCurve curve;
    curve.rates = roots;
    for (size_t i = 0; i < roots.size(); ++i) {
        const double n_i = -chat(static_cast<Eigen::Index>(i));
        curve.numerator.push_back(n_i);
        curve.denominator.push_back(n_i * sr.c / (sr.c + roots[i]));
    }
    return curve;
}

} // namespace

ExitLowCurve exit_low_curve(const ValidatedModel& model) {
    const ScalarRational sr = scalar_rational(model, "exit_low");
    if (!(sr.drift < 0.0))
        throw std::invalid_argument("exit_low: requires negative drift");
    if (sr.lambda2 <= 0.0)
        throw std::invalid_argument("exit_low: requires claim activity (lambda2 > 0)");

    const LundbergRoots lr = lundberg_roots(model);
    const std::vector<double>& roots = lr.roots;
    const int n = static_cast<int>(roots.size());
    if (n != sr.phases)
        throw std::runtime_error("exit_low: root count does not match claim phases");

    // Harmonic ansatz sum_j A_j e^{alpha_j x} on the shifted interval (0, b):
    // the truncated claim integrals leave residual terms (b-x)^p e^{-rate(b-x)}
    // whose coefficients must vanish:
    //   sum_j Chat_j / (rate - alpha_j)^q = 0,  q = 1..shape per component,
    // with alpha_0 = 0, Chat_0 = 1.
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd rhs(n);
    int row = 0;
    for (const auto& comp : sr.components) {
        for (int q = 1; q <= comp.shape; ++q) {
            rhs(row) = -1.0 / std::pow(comp.rate, q);
            for (int j = 0; j < n; ++j)
                a(row, j) = 1.0 / std::pow(comp.rate - roots[static_cast<size_t>(j)], q);
            ++row;
        }
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) {
        ExitLowCurve curve = detail::exit_low_collocation(model, 1.0);
        curve.used_collocation_fallback = true;
        return curve;
    }
    return exit_low_from_ratios(sr, roots, lu.solve(rhs));
}

double exit_low(const ValidatedModel& model, double u, double b) {
    if (!(u > 0.0) || u > b)
        throw std::invalid_argument("exit_low: requires 0 < u <= b");
    return exit_low_curve(model).value(u, b);
}

ExitLowCurve detail::exit_low_collocation(const ValidatedModel& model, double b) {
    const ScalarRational sr = scalar_rational(model, "exit_low");
    const LundbergRoots lr = lundberg_roots(model);
    const std::vector<double>& roots = lr.roots;
    const int n = static_cast<int>(roots.size());

    std::vector<double> alphas{0.0};
    alphas.insert(alphas.end(), roots.begin(), roots.end());

    // Collocate the generator integral-equation residual of the ansatz at
    // 2(n+1) interior points and solve for the A_j in least squares.
    const int n_rows = 2 * (n + 1);
    Eigen::MatrixXd m(n_rows, n + 1);
    Eigen::VectorXd rhs(n_rows);
    for (int t = 0; t < n_rows; ++t) {
        const double x = b * static_cast<double>(t + 1) / static_cast<double>(n_rows + 1);
        rhs(t) = sr.lambda1 * std::exp(-sr.c * x);
        for (int j = 0; j <= n; ++j) {
            const double aj = alphas[static_cast<size_t>(j)];
            double v = sr.lambda1 * std::exp(-sr.c * x) * sr.c / (sr.c + aj);
            for (const auto& comp : sr.components) {
                double fac_p = 1.0;
                for (int p = 0; p < comp.shape; ++p) {
                    if (p > 0) fac_p *= p;
                    v += sr.lambda2 * comp.weight * std::pow(comp.rate, comp.shape) /
                         fac_p * std::exp(-comp.rate * (b - x)) * std::pow(b - x, p) *
                         std::exp(aj * b) /
                         std::pow(comp.rate - aj, comp.shape - p);
                }
            }
            m(t, j) = v;
        }
    }
    Eigen::VectorXd sol = m.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);

    Eigen::VectorXd chat(n);
    for (int i = 0; i < n; ++i)
        chat(i) = sol(i + 1) * std::exp(roots[static_cast<size_t>(i)] * b) / sol(0);
    ExitLowCurve curve = exit_low_from_ratios(sr, roots, chat);
    curve.used_collocation_fallback = true;
    return curve;
}

// ---------------------------------------------------------------------------
// Renewal measure and overshoot law

RenewalMeasure renewal_measure(const ValidatedModel& model) {
    const ScalarRational sr = scalar_rational(model, "renewal_measure");
    if (!(sr.drift < 0.0))
        throw std::invalid_argument("renewal_measure: requires negative drift");
    if (!(sr.lambda1 + sr.lambda2 > 0.0))
        throw std::invalid_argument("renewal_measure: requires jump activity");
    RenewalMeasure r;
    r.atom = 1.0 / (sr.lambda1 + sr.lambda2);
    r.density_scale = 1.0 / (sr.c * std::abs(sr.drift));
    r.sup = sup_law(model);
    return r;
}

double RenewalMeasure::continuous_mass() const {
    return density_scale * (1.0 - sup.atom);
}

OvershootLaw::OvershootLaw(const ValidatedModel& model) {
    const ScalarRational sr = scalar_rational(model, "overshoot_law");
    if (!(sr.drift < 0.0))
        throw std::invalid_argument("overshoot_law: requires negative drift");
    const StateParams& p = model.state(0);

    renewal_atom_ = 1.0 / (sr.lambda1 + sr.lambda2);
    const ExpMixtureLaw sup = sup_law(model);
    const double scale = 1.0 / (sr.c * std::abs(sr.drift));

    // K(w) = pi(w) + c Pi_bar(w): claim jump density plus the flat
    // renewal-gap kernel against the jump-measure tail.
    kernel_ = (p.claim.density() + p.claim.tail() * sr.c) * sr.lambda2;

    rates_ = sup.rates;
    for (size_t i = 0; i < sup.rates.size(); ++i) {
        ladder_coefs_.push_back(sup.weights[i] * sup.rates[i] * scale);
        // G_i(w) = int e^{r_i w} K(w) dw
        kernel_prims_.push_back((kernel_ * ExpPoly::term(1.0, 0, -sup.rates[i]))
                                    .antiderivative());
    }
}

double OvershootLaw::density(double u, double y) const {
    double v = renewal_atom_ * kernel_.eval(u + y);
    for (size_t i = 0; i < rates_.size(); ++i)
        v += ladder_coefs_[i] * std::exp(-rates_[i] * (u + y)) *
             (kernel_prims_[i].eval(u + y) - kernel_prims_[i].eval(y));
    return v;
}

ExpPoly OvershootLaw::density_in_y(double u) const {
    ExpPoly g = kernel_.shifted(u) * renewal_atom_;
    for (size_t i = 0; i < rates_.size(); ++i) {
        const ExpPoly damp = ExpPoly::term(std::exp(-rates_[i] * u), 0, rates_[i]);
        g += damp * kernel_prims_[i].shifted(u) * ladder_coefs_[i];
        g += damp * kernel_prims_[i] * (-ladder_coefs_[i]);
    }
    return g;
}

double OvershootLaw::cumulative(double u, double y) const {
    return density_in_y(u).integrate(0.0, y);
}

double OvershootLaw::total_mass(double u) const {
    return density_in_y(u).integrate_to_inf(0.0);
}

// ---------------------------------------------------------------------------
// Modified two-regime ruin probability

double modified_ruin(const ValidatedModel& model, const ValidatedModel& model_star,
                     double u, double a, double b) {
    if (!(a > 0.0) || a > b)
        throw std::invalid_argument("modified_ruin: requires 0 < a <= b");
    if (!(u > 0.0)) throw std::invalid_argument("modified_ruin: requires u > 0");
    const ScalarRational sr = scalar_rational(model, "modified_ruin");
    const ScalarRational sr_star = scalar_rational(model_star, "modified_ruin");
    if (!(sr.drift < 0.0) || !(sr_star.drift < 0.0))
        throw std::invalid_argument("modified_ruin: requires negative drift in both regimes");

    const ExitLowCurve curve = exit_low_curve(model);
    const ExpMixtureLaw star_sup = sup_law(model_star);
    const OvershootLaw star_g(model_star);
    const double c = sr.c;

    // B_b(a - z) as a function of z on [0, a].
    double den = 1.0;
    for (size_t i = 0; i < curve.rates.size(); ++i)
        den -= curve.denominator[i] * std::exp(-curve.rates[i] * b);
    ExpPoly b_rev = ExpPoly::constant(1.0 / den);
    for (size_t i = 0; i < curve.rates.size(); ++i)
        b_rev += ExpPoly::term(-curve.numerator[i] / den *
                                   std::exp(-curve.rates[i] * a),
                               0, -curve.rates[i]);

    // Star overshoot density split g*(z|v) = phi1(v + z) + sum_i e^{-r_i v} phi2_i(z)
    // with phi2_i(z) = -coef_i e^{-r_i z} G_i(z).
    std::vector<ExpPoly> phi2;
    ExpPoly phi1 = star_g.kernel_ * star_g.renewal_atom_;
    for (size_t i = 0; i < star_g.rates_.size(); ++i) {
        const ExpPoly e_i =
            ExpPoly::term(1.0, 0, star_g.rates_[i]) * star_g.kernel_prims_[i];
        phi1 += e_i * star_g.ladder_coefs_[i];
        phi2.push_back(e_i * (-star_g.ladder_coefs_[i]));
    }

    // J_i = int_0^a phi2_i(z) B_b(a-z) dz
    std::vector<double> j_i;
    for (const ExpPoly& f : phi2) j_i.push_back((f * b_rev).integrate(0.0, a));

    // I_g = int_0^inf c e^{-cx} int_0^a g*(z | b-a+x) B_b(a-z) dz dx
    const ExpPoly psi_q = phi1.exp_weighted_tail(c);  // q -> int c e^{-cx} phi1(q+x) dx
    double i_g = (psi_q.shifted(b - a) * b_rev).integrate(0.0, a);
    for (size_t i = 0; i < star_g.rates_.size(); ++i)
        i_g += std::exp(-star_g.rates_[i] * (b - a)) * c / (c + star_g.rates_[i]) *
               j_i[i];

    // Pbar = int_0^inf c e^{-cx} P{xi*+ < b-a+x} dx
    double pbar = 1.0;
    for (size_t i = 0; i < star_sup.rates.size(); ++i)
        pbar -= star_sup.weights[i] * std::exp(-star_sup.rates[i] * (b - a)) * c /
                (c + star_sup.rates[i]);

    const double denom = 1.0 - i_g;
    if (!(denom > 0.0))
        throw std::runtime_error("modified_ruin: renewal denominator not positive");
    const double w = pbar / denom;

    if (u <= b) return 1.0 - curve.value(u, b) * w;

    // u > b: the path starts below u - b, i.e. in the reduced regime.
    double j_u = (phi1.shifted(u - a) * b_rev).integrate(0.0, a);
    for (size_t i = 0; i < star_g.rates_.size(); ++i)
        j_u += std::exp(-star_g.rates_[i] * (u - a)) * j_i[i];
    return star_sup.tail(u - a) - j_u * w;
}

// ---------------------------------------------------------------------------
// Matrix fixed-point atoms, resolvent, downward passage

namespace {

// int f_k(z) e^{-M z} dz for the state's claim mixture.
Eigen::MatrixXd claim_matrix_laplace(const ClaimLaw& law, const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    for (const auto& comp : law.components()) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(comp.rate * eye + m);
        if (!lu.isInvertible())
            throw std::runtime_error("fixed_point_atoms: singular resolvent of claim phase");
        Eigen::MatrixXd inv = lu.inverse();
        Eigen::MatrixXd pw = eye;
        for (int i = 0; i < comp.shape; ++i) pw = pw * inv;
        out += comp.weight * std::pow(comp.rate, comp.shape) * pw;
    }
    return out;
}

struct FixedPointProblem {
    const ValidatedModel& model;
    bool left;  // true: p_-(0) (integral on the left), false: p^-(0)

    // `factored` holds LU of (Lambda - Q) for the left equation and of its
    // transpose for the right one, so both solves land on the correct side.
    Eigen::MatrixXd map(const Eigen::MatrixXd& p,
                        const Eigen::FullPivLU<Eigen::MatrixXd>& factored) const {
        const int m = model.state_count();
        const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m, m);
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, m);
        for (int k = 0; k < m; ++k)
            rhs(k, k) = model.state(k).lambda1;  // Lambda F_0(0)
        rhs += integral(p);
        if (left) return eye - factored.solve(rhs);
        return eye - factored.solve(rhs.transpose()).transpose();
    }

    // Residual of the displayed equation itself, max-norm.
    double residual(const Eigen::MatrixXd& p,
                    const Eigen::MatrixXd& lam_minus_q) const {
        const int m = model.state_count();
        const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m, m);
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, m);
        for (int k = 0; k < m; ++k) rhs(k, k) = model.state(k).lambda1;
        rhs += integral(p);
        Eigen::MatrixXd lhs;
        if (left) lhs = lam_minus_q * (eye - p);
        else lhs = (eye - p) * lam_minus_q;
        return (lhs - rhs).cwiseAbs().maxCoeff();
    }

    Eigen::MatrixXd integral(const Eigen::MatrixXd& p) const {
        const int m = model.state_count();
        const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m, m);
        Eigen::MatrixXd cmat = Eigen::MatrixXd::Zero(m, m);
        for (int k = 0; k < m; ++k) cmat(k, k) = model.state(k).c;
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
        if (left) {
            // row k: lambda2_k * row_k((I - p) fhat_k(C p))
            const Eigen::MatrixXd arg = cmat * p;
            for (int k = 0; k < m; ++k) {
                const double l2 = model.state(k).lambda2;
                if (l2 == 0.0) continue;
                const Eigen::MatrixXd g =
                    (eye - p) * claim_matrix_laplace(model.state(k).claim, arg);
                out.row(k) = l2 * g.row(k);
            }
        } else {
            // column r: lambda2_r * col_r(fhat_r(p C) (I - p))
            const Eigen::MatrixXd arg = p * cmat;
            for (int r = 0; r < m; ++r) {
                const double l2 = model.state(r).lambda2;
                if (l2 == 0.0) continue;
                const Eigen::MatrixXd g =
                    claim_matrix_laplace(model.state(r).claim, arg) * (eye - p);
                out.col(r) = l2 * g.col(r);
            }
        }
        return out;
    }
};

Eigen::MatrixXd solve_fixed_point(const FixedPointProblem& problem, double tol,
                                  int max_iter, double* out_residual,
                                  int* out_iterations) {
    const int m = problem.model.state_count();
    // Lambda - Q with Lambda = diag(lambda1 + lambda2)
    Eigen::MatrixXd lam_minus_q = -problem.model.generator();
    for (int k = 0; k < m; ++k)
        lam_minus_q(k, k) += problem.model.state(k).lambda1 + problem.model.state(k).lambda2;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(
        problem.left ? lam_minus_q : lam_minus_q.transpose());
    if (!lu.isInvertible())
        throw std::runtime_error("fixed_point_atoms: Lambda - Q is singular");

    // Damped iteration from p = I converges to the maximal substochastic
    // solution, which is the probabilistically relevant one for any drift sign
    // (starting from 0 can stall on the spurious p = 0 fixed point).
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(m, m);
    double res = problem.residual(p, lam_minus_q);
    int iter = 0;
    while (res > tol && iter < max_iter) {
        p = 0.5 * p + 0.5 * problem.map(p, lu);
        res = problem.residual(p, lam_minus_q);
        ++iter;
    }
    if (res > tol)
        throw std::runtime_error("fixed_point_atoms: no convergence after " +
                                 std::to_string(max_iter) +
                                 " iterations, residual " + std::to_string(res));
    *out_residual = res;
    *out_iterations = iter;
    return p;
}

} // namespace

MatrixAtoms fixed_point_atoms(const ValidatedModel& model) {
    const int m = model.state_count();
    MatrixAtoms atoms;
    int it1 = 0, it2 = 0;
    atoms.p_minus = solve_fixed_point(FixedPointProblem{model, true}, 1e-10, 100000,
                                      &atoms.residual_p_minus, &it1);
    atoms.p_upper_minus = solve_fixed_point(FixedPointProblem{model, false}, 1e-10,
                                            100000, &atoms.residual_p_upper_minus, &it2);
    atoms.iterations = std::max(it1, it2);

    Eigen::MatrixXd cmat = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) cmat(k, k) = model.state(k).c;
    atoms.r_minus = cmat * atoms.p_minus;
    atoms.r_upper_minus = atoms.p_upper_minus * cmat;
    return atoms;
}

Eigen::MatrixXd resolvent(const ChainSpec& chain, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("resolvent: requires s > 0");
    const int m = chain.m;
    Eigen::MatrixXd a = s * Eigen::MatrixXd::Identity(m, m) - chain.q;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    return s * lu.inverse();
}

Eigen::MatrixXd passage_probability_down(const ValidatedModel& model, double x,
                                         const MatrixAtoms& atoms) {
    if (x > 0.0)
        throw std::invalid_argument("passage_probability_down: requires x <= 0");
    const int m = model.state_count();
    const Eigen::MatrixXd q_minus =
        Eigen::MatrixXd::Identity(m, m) - atoms.p_minus;
    const Eigen::MatrixXd expo = (atoms.r_minus * x).exp();
    return q_minus * expo;
}

Eigen::MatrixXd passage_probability_down(const ValidatedModel& model, double x) {
    return passage_probability_down(model, x, fixed_point_atoms(model));
}

double smallest_positive_mixture_root(const ValidatedModel& model) {
    if (model.is_scalar()) {
        const LundbergRoots lr = lundberg_roots(model);
        if (lr.roots.empty()) return std::numeric_limits<double>::infinity();
        return lr.roots.front();
    }
    const Eigen::VectorXd& pi = model.stationary();
    auto mix = [&](double alpha) {
        double v = 0.0;
        for (int k = 0; k < model.state_count(); ++k)
            v += pi(k) * state_cumulant(model.state(k), alpha);
        return v;
    };
    double pole = std::numeric_limits<double>::infinity();
    bool any_claims = false;
    for (int k = 0; k < model.state_count(); ++k) {
        if (model.state(k).lambda2 > 0.0) {
            any_claims = true;
            pole = std::min(pole, model.state(k).claim.mgf_abscissa());
        }
    }
    if (!any_claims) return std::numeric_limits<double>::infinity();

    // psi_bar(0) = 0 and psi_bar -> +inf at the smallest claim pole; bracket
    // the first sign change and bisect.
    const double hi_edge = pole * (1.0 - 1e-9);
    double lo = 1e-9 * pole;
    if (mix(lo) >= 0.0)
        throw std::runtime_error("mixture root: cumulant not negative near 0 "
                                 "(non-negative drift?)");
    double hi = hi_edge;
    for (int i = 0; i < 200 && mix(hi) < 0.0; ++i) hi = (hi + hi_edge) / 2.0;
    if (mix(hi) < 0.0)
        throw std::runtime_error("mixture root: no sign change before the MGF pole");
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mix(mid) < 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace ruinlab
