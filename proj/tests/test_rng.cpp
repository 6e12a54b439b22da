// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ruinlab/parallel.hpp"
#include "ruinlab/rng.hpp"

using namespace ruinlab;

TEST_CASE("same (seed, replication) reproduces the sequence") {
    RngStream a(123456789, 42);
    RngStream b(123456789, 42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different replications differ") {
    RngStream a(99, 0);
    RngStream b(99, 1);
    int same = 0;
    for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64();
    CHECK(same == 0);
}

TEST_CASE("different seeds differ") {
    RngStream a(1, 7);
    RngStream b(2, 7);
    int same = 0;
    for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64();
    CHECK(same == 0);
}

TEST_CASE("uniforms stay strictly inside (0,1) and look uniform") {
    RngStream rng(2024, 0);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.next_uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    // mean 1/2, sd of mean = 1/sqrt(12 n)
    CHECK(std::abs(sum / n - 0.5) < 4.0 / std::sqrt(12.0 * n));
}

TEST_CASE("exponential sampling has the right mean") {
    RngStream rng(7, 3);
    const double rate = 2.5;
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += rng.next_exponential(rate);
    const double mean = sum / n;
    CHECK(std::abs(mean - 1.0 / rate) < 4.0 / (rate * std::sqrt(double(n))));
    CHECK_THROWS_AS(rng.next_exponential(0.0), std::domain_error);
}

namespace {
struct Sums {
    double sum = 0.0;
    std::int64_t count = 0;
    void merge(const Sums& o) {
        sum += o.sum;
        count += o.count;
    }
};
} // namespace

TEST_CASE("merged estimates are independent of the worker count") {
    auto body = [](std::int64_t rep, Sums& acc) {
        RngStream rng(555, static_cast<std::uint64_t>(rep));
        double v = 0.0;
        for (int i = 0; i < 10; ++i) v += rng.next_uniform();
        acc.sum += v;
        ++acc.count;
    };
    const Sums w1 = run_replications<Sums>(50000, 1, body);
    const Sums w4 = run_replications<Sums>(50000, 4, body);
    const Sums w8 = run_replications<Sums>(50000, 8, body);
    CHECK(w1.count == 50000);
    // bit-identical merged sums regardless of scheduling
    CHECK(w1.sum == w4.sum);
    CHECK(w1.sum == w8.sum);
}

TEST_CASE("exceptions from worker bodies propagate") {
    auto body = [](std::int64_t rep, Sums&) {
        if (rep == 12345) throw std::runtime_error("boom");
    };
    CHECK_THROWS_WITH_AS((run_replications<Sums>(20000, 4, body)), "boom",
                         std::runtime_error);
}
