#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "tnf/radii.hpp"
#include "tnf/resonance.hpp"
#include "tnf/vector_field.hpp"

namespace tnf {

/// Numeric configuration for the solver's norm report: the iteration-step
/// domain data plus the generic constants (default 1, configurable).
struct HomologicalBounds {
    double r_k;
    double r_next;
    double delta_k;
    double delta_next;
    double g_mk;
    double eps_k;
    double c_omega;
    double c_prime = 1.0; // low frequency constant
    double c_nds = 1.0;   // high frequency constant
};

/// One homological equation [G, a_k S] = rhs: a_k resonant with constant
/// part 1, rhs nonresonant (shifted convention) with quasi-orders in
/// [m_k, m_next - 1].
template <class C>
struct HomologicalProblem {
    Series<C> a_k;
    QuasilinearData<C> qd;
    VectorField<C> rhs;
    long long m_k;
    long long m_next;
    int split_maxQ; // enumeration cap for the frequency split
    std::optional<HomologicalBounds> bounds;
};

struct HomologicalReport {
    double norm_G0 = 0.0;   // |G^0| at (r_3, delta_3)
    double norm_Ginf = 0.0; // |G^inf| at (r_3, delta_3)
    double bound_G0 = 0.0;
    double bound_Ginf = 0.0;
    bool bounds_evaluated = false;
    bool bound_G0_ok = true;
    bool bound_Ginf_ok = true;
    bool a_k_close_to_one = true; // |a_k - 1| <= 1/2 at (r_k, delta_k)
    std::size_t low_terms = 0;
    std::size_t high_terms = 0;
    int split_maxQ = 0;
    double bracket_residual = 0.0; // |[G, a_k S] - rhs| at (r_k, delta_k) when bounds given, else at (1,1)
};

/// D: F -> a_k [F, S].
template <class C>
VectorField<C> operator_D(const VectorField<C>& F, const Series<C>& a_k, const QuasilinearData<C>& qd) {
    const VectorField<C> S = make_S(qd, F.cap());
    return scalar_times_field(a_k, lie_bracket(F, S));
}

/// N: F -> F(a_k) S.
template <class C>
VectorField<C> operator_N(const VectorField<C>& F, const Series<C>& a_k, const QuasilinearData<C>& qd) {
    const Series<C> h = lie_derivative(F, a_k);
    return scalar_times_field(h, make_S(qd, F.cap()));
}

/// Per-class division: multiplies by a_k^-1 componentwise, then divides
/// each term by its class value (shifted divisor on disk components).
/// With the bracket orientation above this satisfies
/// operator_D(D_inverse(R)) = -R up to the cap.
template <class C>
VectorField<C> D_inverse(const VectorField<C>& R, const Series<C>& a_k, const QuasilinearData<C>& qd) {
    const Series<C> ainv = invert_unit(a_k);
    VectorField<C> out(R.dims(), R.cap());
    for (int L = 0; L < R.component_count(); ++L) {
        Series<C> weighted = mul_to_cap(R.component(L), ainv, R.component_cap(L));
        Series<C> divided(R.dims(), R.component_cap(L));
        for (const auto& [idx, c] : weighted.terms()) {
            const C den = component_divisor(idx, qd, L);
            if (divisor_vanishes(den))
                throw math_error("D_inverse: resonant right-hand side term at " + index_str(idx));
            divided.add_term(idx, c / den);
        }
        out.set_component(L, divided);
    }
    return out;
}

namespace detail {

/// -D^-1(R + N(D^-1 R)): the true solution of [G, a_k S] = R on the
/// nonresonant subspace, written with the per-class division above
/// (which inverts D up to sign).
template <class C>
VectorField<C> solve_part(const VectorField<C>& R, const Series<C>& a_k, const QuasilinearData<C>& qd) {
    VectorField<C> V = D_inverse(R, a_k, qd);
    VectorField<C> corrected = add(R, operator_N(V, a_k, qd));
    return scale(D_inverse(corrected, a_k, qd), -scalar_traits<C>::one());
}

} // namespace detail

/// Solves [G, a_k S] = rhs by the low/high frequency split, returning
/// G = G^0 + G^inf plus the evaluated norm estimates.
template <class C>
std::pair<VectorField<C>, HomologicalReport> solve_homological(const HomologicalProblem<C>& prob) {
    using Traits = scalar_traits<C>;
    const Dims dims = prob.qd.dims();
    if (!(prob.rhs.dims() == dims) || !(prob.a_k.dims() == dims))
        throw validation_error("solve_homological: dimension mismatch");
    if (prob.m_k < 1 || prob.m_next <= prob.m_k)
        throw validation_error("solve_homological: need 1 <= m_k < m_next");

    const MultiIndex origin(std::vector<int>(dims.d, 0), std::vector<int>(dims.n, 0));
    if (!Traits::approx_equal(prob.a_k.coeff(origin), Traits::one()))
        throw math_error("solve_homological: a_k must have constant part 1");
    {
        auto [ares, anr] = decompose_resonant(prob.a_k, prob.qd);
        if (!anr.is_zero()) throw math_error("solve_homological: a_k must be resonant");
    }
    if (!prob.rhs.is_zero()) {
        if (vf_order_effective(prob.rhs) < prob.m_k)
            throw math_error("solve_homological: right-hand side quasi-order below m_k");
        for (int L = 0; L < prob.rhs.component_count(); ++L)
            for (const auto& [idx, c] : prob.rhs.component(L).terms())
                if (idx.q_norm() > prob.m_next - 1 + (prob.rhs.is_torus_component(L) ? 0 : 1))
                    throw math_error("solve_homological: right-hand side degree reaches m_next");
    }

    HomologicalReport report;
    report.split_maxQ = prob.split_maxQ;

    auto [low, high] = split_frequencies(prob.rhs, prob.qd, static_cast<int>(prob.m_k), prob.split_maxQ);
    for (int L = 0; L < low.component_count(); ++L) report.low_terms += low.component(L).term_count();
    for (int L = 0; L < high.component_count(); ++L) report.high_terms += high.component(L).term_count();

    VectorField<C> G0 = low.is_zero() ? VectorField<C>::zero(dims, prob.rhs.cap())
                                      : detail::solve_part(low, prob.a_k, prob.qd);
    VectorField<C> Ginf = high.is_zero() ? VectorField<C>::zero(dims, prob.rhs.cap())
                                         : detail::solve_part(high, prob.a_k, prob.qd);
    VectorField<C> G = add(G0, Ginf);

    NormParams residual_params = prob.bounds ? NormParams(prob.bounds->r_k, prob.bounds->delta_k)
                                             : NormParams(1.0, 1.0);
    {
        VectorField<C> aS = scalar_times_field(prob.a_k, make_S(prob.qd, G.cap()));
        report.bracket_residual = vf_norm(sub(lie_bracket(G, aS), prob.rhs), residual_params);
    }

    if (prob.bounds) {
        const HomologicalBounds& b = *prob.bounds;
        const int d = dims.d, n = dims.n;
        const RadiiLadder lad =
            radii_ladder(b.r_k, b.r_next, b.delta_k, b.delta_next, b.g_mk, prob.m_k, n);
        const NormParams inner(lad.r3, lad.delta3);
        report.norm_G0 = vf_norm(G0, inner);
        report.norm_Ginf = vf_norm(Ginf, inner);
        report.a_k_close_to_one =
            weighted_norm(sub(prob.a_k, Series<C>::constant(dims, prob.a_k.cap(), Traits::one())),
                          NormParams(b.r_k, b.delta_k)) <= 0.5;

        const double log_step = std::abs(std::log(lad.delta1 / lad.delta));  // = |ln(delta''/delta')| too
        const double log_inner = std::abs(std::log(lad.delta3 / lad.delta2));
        const double ratio = std::pow(lad.delta2 / lad.delta, static_cast<double>(prob.m_k));
        const double norm_ak = weighted_norm(prob.a_k, NormParams(lad.r2, lad.delta2));
        const double gap1 = lad.r - lad.r1, gap2 = lad.r1 - lad.r2, gap3 = lad.r2 - lad.r3;
        const NormParams outer(b.r_k, b.delta_k);
        const double norm_low = vf_norm(low, outer);
        const double norm_high = vf_norm(high, outer);
        const double inf = std::numeric_limits<double>::infinity();
        // a flat delta ladder (g(m_k) = 1) leaves the rails undefined
        const bool rails_defined = log_step > 0.0 && log_inner > 0.0;

        if (norm_low == 0.0) {
            report.bound_G0 = 0.0;
        } else if (!rails_defined) {
            report.bound_G0 = inf;
        } else {
            report.bound_G0 = b.c_prime * b.g_mk * b.g_mk / std::pow(gap1 * gap2, d + 1) * ratio *
                              norm_ak / std::pow(log_step * log_step, n + 1) * b.c_omega * norm_low /
                              (std::pow(gap3, 2 * d + 4) * std::pow(log_inner, 2 * n + 4));
        }

        const double egap1 = gap1 - b.eps_k, egap2 = gap2 - b.eps_k;
        if (norm_high == 0.0) {
            report.bound_Ginf = 0.0;
        } else if (!rails_defined || egap1 <= 0.0 || egap2 <= 0.0) {
            report.bound_Ginf = inf;
        } else {
            report.bound_Ginf = b.c_nds * norm_high * ratio / std::pow(egap1 * egap2, d + 1) *
                                std::exp(-(lad.r - lad.r2 - 2.0 * b.eps_k) * static_cast<double>(prob.m_k)) /
                                std::pow(log_step * log_step, n + 1) /
                                (std::pow(gap3, 2 * d + 4) * std::pow(log_inner, 2 * n + 4));
        }
        report.bounds_evaluated = true;
        report.bound_G0_ok = report.norm_G0 <= report.bound_G0 * (1.0 + 1e-12) + 1e-300;
        report.bound_Ginf_ok = report.norm_Ginf <= report.bound_Ginf * (1.0 + 1e-12) + 1e-300;
    }

    return {std::move(G), report};
}

} // namespace tnf
