#include "doctest.h"

#include <cmath>

#include "support/generators.hpp"
#include "tnf/series.hpp"

using namespace tnf;
using tnf::testing::Approx;
using tnf::testing::Exact;

namespace {

using ET = scalar_traits<Exact>;

Series<Exact> mono(Dims dims, int cap, std::vector<int> P, std::vector<int> Q, long num,
                   long den = 1) {
    return Series<Exact>::monomial(dims, cap, MultiIndex(std::move(P), std::move(Q)),
                                   ET::from_ratio(num, den));
}

} // namespace

TEST_CASE("monomial product and additive inverse") {
    const Dims dims{1, 1};
    auto y = mono(dims, 4, {0}, {1}, 1);
    auto yy = mul(y, y);
    CHECK(yy == mono(dims, 4, {0}, {2}, 1));

    auto t = mono(dims, 4, {1}, {1}, 1);
    CHECK(add(t, scale(t, ET::from_int(-1))).is_zero());
}

TEST_CASE("product of units truncates cross terms") {
    // (1 + e^{iX} Y)(1 - e^{iX} Y) at cap 2
    const Dims dims{1, 1};
    auto one = Series<Exact>::constant(dims, 2, ET::one());
    auto a = add(one, mono(dims, 2, {1}, {1}, 1));
    auto b = sub(one, mono(dims, 2, {1}, {1}, 1));
    auto prod = mul(a, b);
    auto expected = sub(one, mono(dims, 2, {2}, {2}, 1));
    CHECK(prod == expected);
    CHECK(prod == tnf::testing::naive_mul(a, b, 2));
}

TEST_CASE("ring ops reject mismatched dims and caps") {
    auto a = Series<Exact>::constant({1, 1}, 3, ET::one());
    auto b = Series<Exact>::constant({1, 2}, 3, ET::one());
    CHECK_THROWS_AS((void)add(a, b), validation_error);
    auto c = Series<Exact>::constant({1, 1}, 2, ET::one());
    CHECK_THROWS_AS((void)mul(a, c), validation_error);
    CHECK_THROWS_AS((void)add(a, c), validation_error);
}

TEST_CASE("truncation keeps low Y-degrees and ignores Fourier index") {
    const Dims dims{1, 1};
    auto f = add(mono(dims, 3, {0}, {1}, 1), mono(dims, 3, {0}, {2}, 1));
    CHECK(truncate(f, 1) == mono(dims, 1, {0}, {1}, 1));

    auto g = add(mono(dims, 3, {3}, {0}, 1), mono(dims, 3, {0}, {1}, 1));
    CHECK(truncate(g, 0) == mono(dims, 0, {3}, {0}, 1));

    CHECK(truncate(Series<Exact>::zero(dims, 3), 2).is_zero());
    CHECK_THROWS_AS((void)truncate(f, -1), validation_error);
}

TEST_CASE("truncation lattice property") {
    const Dims dims{2, 2};
    for (int trial = 0; trial < 30; ++trial) {
        auto f = tnf::testing::rand_series<Exact>(dims, 5, 10);
        const int j = tnf::testing::rand_int(0, 5);
        const int k = tnf::testing::rand_int(0, 5);
        if (j > k) continue;
        CHECK(truncate(truncate(f, k), j) == truncate(f, std::min(j, k)));
    }
}

TEST_CASE("order_of") {
    const Dims d12{1, 2};
    auto f = add(mono(d12, 4, {0}, {2, 1}, 1), mono(d12, 4, {1}, {3, 0}, 1));
    CHECK(order_of(f) == 3);
    CHECK(order_of(mono(d12, 4, {5}, {0, 0}, 1)) == 0);
    CHECK(order_of(Series<Exact>::zero(d12, 4)) == 5); // cap + 1 sentinel
}

TEST_CASE("order additivity under products") {
    const Dims dims{1, 2};
    for (int trial = 0; trial < 25; ++trial) {
        auto a = tnf::testing::rand_series<Exact>(dims, 6, 6);
        auto b = tnf::testing::rand_series<Exact>(dims, 6, 6);
        auto p = mul(a, b);
        if (p.is_zero()) continue;
        CHECK(order_of(p) >= std::min(order_of(a) + order_of(b), 7));
    }
}

TEST_CASE("derivatives") {
    const Dims dims{1, 1};
    auto f = mono(dims, 3, {2}, {1}, 1);
    auto dfx = dx(f, 0);
    CHECK(dfx == Series<Exact>::monomial(dims, 3, {{2}, {1}},
                                         ET::imaginary_unit() * ET::from_int(2)));
    CHECK(dy(mono(dims, 3, {0}, {2}, 1), 0) == mono(dims, 3, {0}, {1}, 2));
    CHECK(dy(mono(dims, 3, {1}, {0}, 1), 0).is_zero());
}

TEST_CASE("weighted norm single and multi term sums") {
    const Dims dims{1, 1};
    auto f = mono(dims, 2, {1}, {1}, 2);
    CHECK(weighted_norm(f, {1.0, 0.5}) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    CHECK(weighted_norm(Series<Exact>::zero(dims, 2), {1.0, 0.5}) == 0.0);

    const Dims d12{1, 2};
    auto g = add(mono(d12, 2, {0}, {1, 1}, 3),
                 Series<Exact>::monomial(d12, 2, {{-2}, {0, 0}}, ET::from_int(1) + ET::imaginary_unit()));
    const double expected = 3.0 * 0.0625 + std::sqrt(2.0) * std::exp(1.0);
    CHECK(weighted_norm(g, {0.5, 0.25}) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("norm submultiplicativity and coefficient bound") {
    const Dims dims{1, 1};
    for (int trial = 0; trial < 40; ++trial) {
        auto a = tnf::testing::rand_series<Approx>(dims, 4, 6);
        auto b = tnf::testing::rand_series<Approx>(dims, 4, 6);
        const NormParams p(0.25 + 0.05 * tnf::testing::rand_int(0, 10),
                           0.1 + 0.05 * tnf::testing::rand_int(0, 10));
        CHECK(weighted_norm(mul(a, b), p) <= weighted_norm(a, p) * weighted_norm(b, p) + 1e-9);
        const double na = weighted_norm(a, p);
        for (const auto& [idx, c] : a.terms()) {
            CHECK(std::abs(c) <=
                  na * std::exp(-p.r * idx.p_norm()) * std::pow(p.delta, -idx.q_norm()) + 1e-9);
        }
    }
}

TEST_CASE("exact ring laws on random series") {
    const Dims dims{2, 1};
    for (int trial = 0; trial < 15; ++trial) {
        auto a = tnf::testing::rand_series<Exact>(dims, 3, 5, 2);
        auto b = tnf::testing::rand_series<Exact>(dims, 3, 5, 2);
        auto c = tnf::testing::rand_series<Exact>(dims, 3, 5, 2);
        CHECK(mul(a, b) == mul(b, a));
        CHECK(mul(mul(a, b), c) == mul(a, mul(b, c)));
        CHECK(mul(a, add(b, c)) == add(mul(a, b), mul(a, c)));
    }
}

TEST_CASE("invert_unit") {
    const Dims dims{1, 1};
    auto one = Series<Exact>::constant(dims, 2, ET::one());
    CHECK(invert_unit(one) == one);

    auto f = add(one, mono(dims, 2, {0}, {1}, 1));
    auto expected = add(sub(one, mono(dims, 2, {0}, {1}, 1)), mono(dims, 2, {0}, {2}, 1));
    CHECK(invert_unit(f) == expected);

    const Dims d12{1, 2};
    auto one4 = Series<Exact>::constant(d12, 4, ET::one());
    auto g = add(one4, mono(d12, 4, {0}, {1, 1}, 1, 2));
    auto ginv = invert_unit(g);
    auto expect4 = add(sub(one4, mono(d12, 4, {0}, {1, 1}, 1, 2)), mono(d12, 4, {0}, {2, 2}, 1, 4));
    CHECK(ginv == expect4);
    CHECK(mul(g, ginv) == one4);

    CHECK_THROWS_AS((void)invert_unit(mono(dims, 2, {0}, {1}, 1)), math_error);
    // order-0 Fourier tail: the finite Neumann sum cannot terminate
    CHECK_THROWS_AS((void)invert_unit(add(one, mono(dims, 2, {1}, {0}, 1))), math_error);
}

TEST_CASE("invert_unit round trip on random units") {
    const Dims dims{1, 2};
    for (int trial = 0; trial < 20; ++trial) {
        auto tail = tnf::testing::rand_series<Exact>(dims, 4, 5, 2, 1);
        auto f = add(Series<Exact>::constant(dims, 4, ET::one()), tail);
        CHECK(mul(f, invert_unit(f)) == Series<Exact>::constant(dims, 4, ET::one()));
    }
}

TEST_CASE("supnorm bound sampled on a grid") {
    const Dims dims{1, 1};
    const NormParams p(0.5, 0.5);
    for (int trial = 0; trial < 10; ++trial) {
        auto f = tnf::testing::rand_series<Approx>(dims, 4, 8);
        const double norm = weighted_norm(f, p);
        for (int a = 0; a < 8; ++a) {
            for (int b = 0; b < 8; ++b) {
                const double theta = 2.0 * M_PI * a / 8;
                const double phase = 2.0 * M_PI * b / 8;
                for (double edge : {-p.r, p.r}) {
                    std::vector<std::complex<double>> X{{theta, edge}};
                    std::vector<std::complex<double>> Y{std::polar(p.delta, phase)};
                    CHECK(std::abs(eval(f, X, Y)) <= norm + 1e-9);
                }
            }
        }
    }
}
