// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ruinlab/pricing.hpp"
#include "ruinlab/report.hpp"

using namespace ruinlab;

namespace {
GSQuery base_query(double u = 0.1, double a = 0.3, double b = 0.3, double s = 0.0) {
    GSQuery q;
    q.u = u;
    q.a = a;
    q.b = b;
    q.s = s;
    q.penalty = make_constant_penalty(1.0);
    return q;
}
} // namespace

TEST_CASE("put penalty shape") {
    const PenaltyFn w = make_put_penalty(10.0, 0.0);
    SUBCASE("approaches the strike for deep overshoots") {
        CHECK(w.eval(1.0, 40.0) == doctest::Approx(10.0).epsilon(1e-12));
    }
    SUBCASE("zero when the discounted boundary exceeds the strike") {
        const PenaltyFn w2 = make_put_penalty(0.5, 0.0);
        CHECK(w2.eval(1.0, 0.1) == 0.0);  // exp(-0.1) = 0.905 > 0.5
    }
    SUBCASE("independent of the undershoot argument") {
        for (double y : {0.01, 0.5, 2.0, 10.0}) CHECK(w.eval(1.0, y) == w.eval(7.0, y));
    }
    SUBCASE("strike must be positive") {
        CHECK_THROWS_AS(make_put_penalty(0.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(make_put_penalty(-1.0, 0.0), std::invalid_argument);
    }
}

TEST_CASE("gerber_shiu identities") {
    const ValidatedModel base = validate_model(fixture_model());
    const ValidatedModel star = validate_model(fixture_model_star());
    McOptions opts;
    opts.n = 100000;

    SUBCASE("w == 1, s = 0 equals the modified-ruin estimator bit-exactly") {
        const MCEstimate gs = gerber_shiu(base, star, base_query(), opts);
        const MCEstimate mod = estimate_modified_ruin(base, star, 0.1, 0.3, 0.3, opts);
        CHECK(gs.value == mod.value);
        CHECK(gs.stderr_ == mod.stderr_);
    }
    SUBCASE("w == 0 gives exactly zero") {
        GSQuery q = base_query();
        q.penalty = make_constant_penalty(0.0);
        CHECK(gerber_shiu(base, star, q, opts).value == 0.0);
    }
    SUBCASE("linearity on shared seeds") {
        GSQuery q1 = base_query();
        q1.penalty.eval = [](double, double y) { return 1.0 + y; };
        GSQuery q2 = base_query();
        q2.penalty.eval = [](double, double y) { return 2.0 * (1.0 + y); };
        const double v1 = gerber_shiu(base, star, q1, opts).value;
        const double v2 = gerber_shiu(base, star, q2, opts).value;
        CHECK(v2 == doctest::Approx(2.0 * v1).epsilon(1e-14));
    }
    SUBCASE("query validation") {
        CHECK_THROWS_AS(gerber_shiu(base, star, base_query(0.1, 0.4, 0.3), opts),
                        std::invalid_argument);
        CHECK_THROWS_AS(gerber_shiu(base, star, base_query(0.0), opts),
                        std::invalid_argument);
        GSQuery negative = base_query();
        negative.penalty.eval = [](double, double) { return -1.0; };
        CHECK_THROWS_AS(gerber_shiu(base, star, negative, opts), std::invalid_argument);
    }
    SUBCASE("explosive penalty raises the variance warning") {
        GSQuery q = base_query();
        q.penalty.eval = [](double, double y) { return std::exp(40.0 * y); };
        McOptions small = opts;
        small.n = 20000;
        const MCEstimate est = gerber_shiu(base, star, q, small);
        CHECK(est.variance_warning);
    }
}

TEST_CASE("perpetual put pricing") {
    const ValidatedModel base = validate_model(fixture_model());
    const ValidatedModel star = validate_model(fixture_model_star());
    McOptions opts;
    opts.n = 100000;

    PutContract contract;
    contract.strike = 1.0;
    contract.log_boundary = -0.4;
    contract.discount = 1.0;
    contract.log_price = 0.0;

    SUBCASE("price is within [0, K]") {
        const MCEstimate price = price_perpetual_put(base, star, contract, 0.2, 0.2, opts);
        CHECK(price.value >= 0.0);
        CHECK(price.value <= contract.strike);
    }
    SUBCASE("equivalence with gerber_shiu at the shifted level, bit-exact") {
        GSQuery q;
        q.u = contract.log_price - contract.log_boundary;
        q.a = 0.2;
        q.b = 0.2;
        q.s = contract.discount;
        q.penalty = make_put_penalty(contract.strike, contract.log_boundary);
        const MCEstimate direct = gerber_shiu(base, star, q, opts);
        const MCEstimate price = price_perpetual_put(base, star, contract, 0.2, 0.2, opts);
        CHECK(price.value == direct.value);
        CHECK(price.stderr_ == direct.stderr_);
    }
    SUBCASE("discount monotonicity on shared seeds") {
        PutContract c1 = contract, c2 = contract, c3 = contract;
        c1.discount = 0.5;
        c2.discount = 1.0;
        c3.discount = 2.0;
        const double p1 = price_perpetual_put(base, star, c1, 0.2, 0.2, opts).value;
        const double p2 = price_perpetual_put(base, star, c2, 0.2, 0.2, opts).value;
        const double p3 = price_perpetual_put(base, star, c3, 0.2, 0.2, opts).value;
        CHECK(p2 <= p1);
        CHECK(p3 <= p2);
    }
    SUBCASE("tiny strike prices to nearly nothing") {
        PutContract c = contract;
        c.strike = 1e-9;
        c.log_boundary = -30.0;
        const MCEstimate price = price_perpetual_put(base, star, c, 0.2, 0.2, opts);
        CHECK(price.value <= 1e-9);
    }
    SUBCASE("contract validation") {
        PutContract bad = contract;
        bad.log_boundary = 0.5;  // exp(beta) > exp(u) = 1
        CHECK_THROWS_AS(price_perpetual_put(base, star, bad, 0.2, 0.2, opts),
                        std::invalid_argument);
    }
}

TEST_CASE("boundary search") {
    const ValidatedModel base = validate_model(fixture_model());
    const ValidatedModel star = validate_model(fixture_model_star());
    McOptions opts;
    opts.n = 50000;

    SUBCASE("single-point grid returns that point") {
        const BoundarySearchResult r =
            boundary_search(base, star, 0.0, 1.0, 1.0, {-0.3}, 0.2, 0.2, opts);
        CHECK(r.best_beta == -0.3);
        REQUIRE(r.prices.size() == 1);
    }
    SUBCASE("returned maximum dominates the whole curve") {
        const std::vector<double> grid{-0.8, -0.6, -0.4, -0.2, -0.1};
        const BoundarySearchResult r =
            boundary_search(base, star, 0.0, 1.0, 1.0, grid, 0.2, 0.2, opts);
        for (const MCEstimate& p : r.prices) CHECK(r.best_price.value >= p.value);
    }
    SUBCASE("grid refinement never lowers the reported maximum on shared seeds") {
        const std::vector<double> coarse{-0.8, -0.4, -0.1};
        const std::vector<double> fine{-0.8, -0.6, -0.4, -0.2, -0.1};
        const double vc =
            boundary_search(base, star, 0.0, 1.0, 1.0, coarse, 0.2, 0.2, opts)
                .best_price.value;
        const double vf =
            boundary_search(base, star, 0.0, 1.0, 1.0, fine, 0.2, 0.2, opts)
                .best_price.value;
        CHECK(vf >= vc);
    }
    SUBCASE("empty and invalid grids are rejected") {
        CHECK_THROWS_AS(boundary_search(base, star, 0.0, 1.0, 1.0, {}, 0.2, 0.2, opts),
                        std::invalid_argument);
        CHECK_THROWS_AS(
            boundary_search(base, star, 0.0, 1.0, 1.0, {0.5}, 0.2, 0.2, opts),
            std::invalid_argument);
    }
}
