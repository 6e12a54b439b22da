// SPDX-License-Identifier: Apache-2.0

#include "ruinlab/exppoly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ruinlab {

namespace {

constexpr double kRateMergeTol = 1e-12;

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i)
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

double factorial_ratio(int n, int m) {
    // n! / m!, n >= m
    double r = 1.0;
    for (int i = m + 1; i <= n; ++i) r *= static_cast<double>(i);
    return r;
}

// integral_a^b x^k exp(-r x) dx for finite a <= b, any real r.
double finite_moment_integral(int k, double r, double a, double b) {
    if (std::abs(r) < kRateMergeTol) {
        return (std::pow(b, k + 1) - std::pow(a, k + 1)) / static_cast<double>(k + 1);
    }
    // antiderivative: -exp(-r x) sum_{j=0..k} (k!/j!) x^j / r^{k-j+1}
    auto F = [&](double x) {
        double s = 0.0;
        for (int j = 0; j <= k; ++j)
            s += factorial_ratio(k, j) * std::pow(x, j) / std::pow(r, k - j + 1);
        return -std::exp(-r * x) * s;
    };
    return F(b) - F(a);
}

} // namespace

ExpPoly ExpPoly::constant(double c) { return term(c, 0, 0.0); }

ExpPoly ExpPoly::term(double coef, int power, double rate) {
    ExpPoly p;
    p.add_term(coef, power, rate);
    p.normalize();
    return p;
}

void ExpPoly::add_term(double coef, int power, double rate) {
    if (coef == 0.0) return;
    if (power < 0) throw std::invalid_argument("ExpPoly: negative power");
    terms_.push_back(Term{power, rate, coef});
}

void ExpPoly::normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
        if (a.rate != b.rate) return a.rate < b.rate;
        return a.power < b.power;
    });
    std::vector<Term> merged;
    for (const Term& t : terms_) {
        if (!merged.empty() && merged.back().power == t.power &&
            std::abs(merged.back().rate - t.rate) <=
                kRateMergeTol * (1.0 + std::abs(t.rate))) {
            merged.back().coef += t.coef;
        } else {
            merged.push_back(t);
        }
    }
    terms_.clear();
    for (const Term& t : merged)
        if (t.coef != 0.0) terms_.push_back(t);
}

ExpPoly& ExpPoly::operator+=(const ExpPoly& other) {
    for (const Term& t : other.terms_) terms_.push_back(t);
    normalize();
    return *this;
}

ExpPoly ExpPoly::operator+(const ExpPoly& other) const {
    ExpPoly r = *this;
    r += other;
    return r;
}

ExpPoly ExpPoly::operator*(double scalar) const {
    ExpPoly r;
    for (const Term& t : terms_) r.add_term(t.coef * scalar, t.power, t.rate);
    r.normalize();
    return r;
}

ExpPoly ExpPoly::operator*(const ExpPoly& other) const {
    ExpPoly r;
    for (const Term& a : terms_)
        for (const Term& b : other.terms_)
            r.add_term(a.coef * b.coef, a.power + b.power, a.rate + b.rate);
    r.normalize();
    return r;
}

double ExpPoly::eval(double x) const {
    double s = 0.0;
    for (const Term& t : terms_)
        s += t.coef * std::pow(x, t.power) * std::exp(-t.rate * x);
    return s;
}

ExpPoly ExpPoly::shifted(double h) const {
    if (h == 0.0) return *this;
    ExpPoly r;
    for (const Term& t : terms_) {
        const double scale = t.coef * std::exp(-t.rate * h);
        for (int j = 0; j <= t.power; ++j)
            r.add_term(scale * binomial(t.power, j) * std::pow(h, t.power - j),
                       j, t.rate);
    }
    r.normalize();
    return r;
}

ExpPoly ExpPoly::antiderivative() const {
    ExpPoly r;
    for (const Term& t : terms_) {
        if (std::abs(t.rate) < kRateMergeTol) {
            r.add_term(t.coef / static_cast<double>(t.power + 1), t.power + 1, 0.0);
        } else {
            for (int j = 0; j <= t.power; ++j)
                r.add_term(-t.coef * factorial_ratio(t.power, j) /
                               std::pow(t.rate, t.power - j + 1),
                           j, t.rate);
        }
    }
    r.normalize();
    return r;
}

double ExpPoly::integrate(double a, double b) const {
    double s = 0.0;
    for (const Term& t : terms_)
        s += t.coef * finite_moment_integral(t.power, t.rate, a, b);
    return s;
}

double ExpPoly::integrate_to_inf(double a) const {
    double s = 0.0;
    for (const Term& t : terms_) {
        if (t.rate <= 0.0)
            throw std::domain_error("ExpPoly: divergent tail integral (rate <= 0)");
        double part = 0.0;
        for (int j = 0; j <= t.power; ++j)
            part += factorial_ratio(t.power, j) * std::pow(a, j) /
                    std::pow(t.rate, t.power - j + 1);
        s += t.coef * std::exp(-t.rate * a) * part;
    }
    return s;
}

ExpPoly ExpPoly::exp_weighted_tail(double weight) const {
    ExpPoly r;
    for (const Term& t : terms_) {
        const double lam = weight + t.rate;
        if (lam <= 0.0)
            throw std::domain_error("ExpPoly: divergent exponential weighting");
        // int_0^inf w e^{-w x} (q+x)^k e^{-rate (q+x)} dx
        //   = e^{-rate q} sum_j C(k,j) q^j * w (k-j)! / lam^{k-j+1}
        for (int j = 0; j <= t.power; ++j) {
            const double c = t.coef * binomial(t.power, j) * weight *
                             factorial_ratio(t.power - j, 0) /
                             std::pow(lam, t.power - j + 1);
            r.add_term(c, j, t.rate);
        }
    }
    r.normalize();
    return r;
}

} // namespace ruinlab
