#include "doctest.h"

#include "support/generators.hpp"
#include "tnf/homological.hpp"

using namespace tnf;
using tnf::testing::Exact;
using tnf::testing::qd_exact;

namespace {

using ET = scalar_traits<Exact>;

/// Random resonant unit 1 + combination of (Y1 Y2)^m under lambda = (1,-1).
Series<Exact> rand_resonant_unit(Dims dims, int cap) {
    Series<Exact> a = Series<Exact>::constant(dims, cap, ET::one());
    for (int m = 1; 2 * m <= cap; ++m)
        if (tnf::testing::rand_int(0, 1))
            a.add_term({{0}, {m, m}}, tnf::testing::rand_coeff<Exact>());
    return a;
}

} // namespace

TEST_CASE("operator_D on monomial fields") {
    auto qd = qd_exact({1}, {{1, 0}, {-1, 0}});
    const Dims dims{1, 2};
    const int cap = 4;
    auto one = Series<Exact>::constant(dims, cap, ET::one());

    // resonant monomial field is annihilated
    VectorField<Exact> W(dims, cap);
    W.add_term(0, {{0}, {1, 1}}, ET::one());
    CHECK(operator_D(W, one, qd).is_zero());

    // eigenvalue with the sign flip: D F = a [F, S] = -(i+1) F for F at divisor i+1
    VectorField<Exact> F(dims, cap);
    F.add_term(0, {{1}, {1, 0}}, ET::one());
    const Exact c = ET::imaginary_unit() + ET::one();
    CHECK(operator_D(F, one, qd) == scale(F, -c));

    auto a = add(one, Series<Exact>::monomial(dims, cap, {{0}, {1, 1}}, ET::one()));
    CHECK(operator_D(F, a, qd) == scalar_times_field(a, scale(F, -c)));
}

TEST_CASE("operator_N vanishes for constant a and is nilpotent") {
    auto qd = qd_exact({1}, {{1, 0}, {-1, 0}});
    const Dims dims{1, 2};
    const int cap = 4;
    auto one = Series<Exact>::constant(dims, cap, ET::one());

    for (int trial = 0; trial < 25; ++trial) {
        auto F = tnf::testing::rand_perturbation<Exact>(dims, cap, 4, 2);
        CHECK(operator_N(F, one, qd).is_zero());

        auto a = rand_resonant_unit(dims, cap);
        auto NF = operator_N(F, a, qd);
        CHECK(operator_N(NF, a, qd).is_zero());                      // N^2 = 0
        CHECK(operator_D(NF, a, qd) == operator_N(operator_D(F, a, qd), a, qd)); // DN = ND
    }
}

TEST_CASE("D_inverse divides class slices and round-trips with a sign") {
    auto qd = qd_exact({1}, {{1, 0}, {-1, 0}});
    const Dims dims{1, 2};
    const int cap = 4;
    auto one = Series<Exact>::constant(dims, cap, ET::one());

    VectorField<Exact> R(dims, cap);
    R.add_term(0, {{1}, {1, 0}}, ET::one());
    const Exact c = ET::imaginary_unit() + ET::one();
    CHECK(D_inverse(R, one, qd) == scale(R, ET::one() / c));
    CHECK(operator_D(D_inverse(R, one, qd), one, qd) == scale(R, ET::from_int(-1)));

    CHECK(D_inverse(VectorField<Exact>::zero(dims, cap), one, qd).is_zero());

    VectorField<Exact> bad(dims, cap);
    bad.add_term(0, {{0}, {1, 1}}, ET::one());
    CHECK_THROWS_AS((void)D_inverse(bad, one, qd), math_error);

    for (int trial = 0; trial < 20; ++trial) {
        auto a = rand_resonant_unit(dims, cap);
        auto [res, nr] = decompose_resonant(tnf::testing::rand_perturbation<Exact>(dims, cap, 5, 2), qd);
        if (nr.is_zero()) continue;
        CHECK(operator_D(D_inverse(nr, a, qd), a, qd) == scale(nr, ET::from_int(-1)));
    }
}

TEST_CASE("solve_homological bracket contract") {
    auto qd = qd_exact({1}, {{-1, 0}});
    const Dims dims{1, 1};
    const int cap = 4;

    SUBCASE("zero right-hand side") {
        HomologicalProblem<Exact> prob{Series<Exact>::constant(dims, cap, ET::one()), qd,
                                       VectorField<Exact>::zero(dims, cap), 1, 3, cap + 1, {}};
        auto [G, rep] = solve_homological(prob);
        CHECK(G.is_zero());
        CHECK(rep.bracket_residual == 0.0);
    }

    SUBCASE("single-divisor hand solve") {
        VectorField<Exact> rhs(dims, cap);
        rhs.add_term(1, {{1}, {2}}, ET::from_ratio(1, 10));
        HomologicalProblem<Exact> prob{Series<Exact>::constant(dims, cap, ET::one()), qd, rhs, 1, 3,
                                       cap + 1, {}};
        auto [G, rep] = solve_homological(prob);
        // single coefficient (1/10)/(i-1), orientation fixed by the contract
        const Exact expected = ET::from_ratio(-1, 10) / (ET::imaginary_unit() - ET::one());
        CHECK(G.component(1).coeff({{1}, {2}}) == expected);
        CHECK(rep.bracket_residual == 0.0);

        auto aS = make_S(qd, cap);
        CHECK(lie_bracket(G, aS) == rhs);
    }
}

TEST_CASE("solve_homological with nontrivial resonant weight") {
    auto qd = qd_exact({1}, {{1, 0}, {-1, 0}});
    const Dims dims{1, 2};
    const int cap = 5;

    for (int trial = 0; trial < 20; ++trial) {
        auto a = rand_resonant_unit(dims, cap);
        auto pert = tnf::testing::rand_perturbation<Exact>(dims, cap, 5, 2);
        auto [res, nr] = decompose_resonant(pert, qd);
        // keep quasi-orders within [1, m_next - 1]
        auto rhs = vf_truncate(nr, 3);
        if (rhs.is_zero()) continue;

        HomologicalProblem<Exact> prob{a, qd, rhs, 1, 4, cap + 1, {}};
        auto [G, rep] = solve_homological(prob);
        auto aS = scalar_times_field(a, make_S(qd, cap));
        CHECK(lie_bracket(G, aS) == rhs);
        CHECK(rep.bracket_residual == 0.0);
    }
}

TEST_CASE("operators preserve divisor classes") {
    auto qd = qd_exact({1}, {{1, 0}, {-1, 0}});
    const Dims dims{1, 2};
    const int cap = 4;

    auto class_values = [&](const VectorField<Exact>& F) {
        std::vector<Exact> vals;
        for (int L = 0; L < F.component_count(); ++L)
            for (const auto& [idx, c] : F.component(L).terms())
                vals.push_back(component_divisor(idx, qd, L));
        std::sort(vals.begin(), vals.end(), ET::value_less);
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        return vals;
    };
    auto subset_of = [&](const std::vector<Exact>& a, const std::vector<Exact>& b) {
        for (const auto& v : a)
            if (std::find(b.begin(), b.end(), v) == b.end()) return false;
        return true;
    };

    for (int trial = 0; trial < 20; ++trial) {
        auto a = rand_resonant_unit(dims, cap);
        auto F = tnf::testing::rand_perturbation<Exact>(dims, cap, 4, 2);
        auto in_vals = class_values(F);
        CHECK(subset_of(class_values(operator_D(F, a, qd)), in_vals));
        CHECK(subset_of(class_values(operator_N(F, a, qd)), in_vals));
    }
}

TEST_CASE("solve_homological validates the problem") {
    auto qd = qd_exact({1}, {{-1, 0}});
    const Dims dims{1, 1};
    const int cap = 4;
    auto one = Series<Exact>::constant(dims, cap, ET::one());

    VectorField<Exact> rhs(dims, cap);
    rhs.add_term(1, {{1}, {2}}, ET::one());

    // a_k without constant part 1
    HomologicalProblem<Exact> p1{Series<Exact>::zero(dims, cap), qd, rhs, 1, 3, cap + 1, {}};
    CHECK_THROWS_AS((void)solve_homological(p1), math_error);

    // nonresonant a_k
    auto a_bad = add(one, Series<Exact>::monomial(dims, cap, {{1}, {1}}, ET::one()));
    HomologicalProblem<Exact> p2{a_bad, qd, rhs, 1, 3, cap + 1, {}};
    CHECK_THROWS_AS((void)solve_homological(p2), math_error);

    // resonant right-hand side term
    VectorField<Exact> rhs_bad(dims, cap);
    rhs_bad.add_term(1, {{0}, {1}}, ET::one());
    HomologicalProblem<Exact> p3{one, qd, rhs_bad, 1, 3, cap + 1, {}};
    CHECK_THROWS_AS((void)solve_homological(p3), math_error);
}

TEST_CASE("norm report against the configured bounds") {
    auto qd = qd_exact({1}, {{-1, 0}});
    const Dims dims{1, 1};
    const int cap = 4;
    VectorField<Exact> rhs(dims, cap);
    rhs.add_term(1, {{1}, {2}}, ET::from_ratio(1, 10));

    HomologicalBounds b;
    b.r_k = 1.0;
    b.r_next = 0.6;
    b.delta_k = 0.5;
    b.delta_next = 0.4;
    b.g_mk = 2.0;
    b.eps_k = 0.01;
    b.c_omega = 1.0;
    HomologicalProblem<Exact> prob{Series<Exact>::constant(dims, cap, ET::one()), qd, rhs, 1, 3,
                                   cap + 1, b};
    auto [G, rep] = solve_homological(prob);
    CHECK(rep.bounds_evaluated);
    CHECK(rep.a_k_close_to_one);
    CHECK(rep.norm_G0 >= 0.0);
    CHECK(rep.low_terms + rep.high_terms == 1);
}
