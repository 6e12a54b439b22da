// SPDX-License-Identifier: Apache-2.0

#ifndef RUINLAB_EXPPOLY_HPP
#define RUINLAB_EXPPOLY_HPP

#include <cstdint>
#include <vector>

namespace ruinlab {

/// Exact calculus on finite sums  f(x) = sum_i coef_i * x^power_i * exp(-rate_i * x).
///
/// Erlang-family claim densities, jump-measure tails, ladder-height densities
/// and every integral the scalar analytics need stay inside this family, so
/// products, shifts and (improper) integrals below are all closed-form.
class ExpPoly {
public:
    struct Term {
        int power = 0;       // x^power, power >= 0
        double rate = 0.0;   // exp(-rate*x); may be negative on finite intervals
        double coef = 0.0;
    };

    ExpPoly() = default;

    static ExpPoly zero() { return {}; }
    static ExpPoly constant(double c);
    /// coef * x^power * exp(-rate*x)
    static ExpPoly term(double coef, int power, double rate);

    bool empty() const { return terms_.empty(); }
    const std::vector<Term>& terms() const { return terms_; }

    ExpPoly& operator+=(const ExpPoly& other);
    ExpPoly operator+(const ExpPoly& other) const;
    ExpPoly operator*(double scalar) const;
    /// Pointwise product; stays in the family.
    ExpPoly operator*(const ExpPoly& other) const;

    double eval(double x) const;

    /// f(x + h) as a function of x.
    ExpPoly shifted(double h) const;

    /// Indefinite integral F with F' = f (no constant of integration).
    ExpPoly antiderivative() const;

    /// Integral over the finite interval [a, b].
    double integrate(double a, double b) const;

    /// Integral over [a, infinity); requires every term with a nonzero
    /// coefficient to have rate > 0 (throws std::domain_error otherwise).
    double integrate_to_inf(double a) const;

    /// q |-> integral_0^inf weight*exp(-weight*x) * f(q + x) dx, as an ExpPoly
    /// in q. Requires weight + rate > 0 for every term.
    ExpPoly exp_weighted_tail(double weight) const;

private:
    void add_term(double coef, int power, double rate);
    void normalize();

    std::vector<Term> terms_;
};

} // namespace ruinlab

#endif
