#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "tnf/resonance.hpp"
#include "tnf/vector_field.hpp"

namespace tnf {

template <class C>
bool series_matches(const Series<C>& a, const Series<C>& b) {
    if constexpr (scalar_traits<C>::exact) {
        return a.terms() == b.terms();
    } else {
        return max_coeff_delta(a, b) <= float_config::comparison_tol();
    }
}

template <class C>
bool field_matches(const VectorField<C>& a, const VectorField<C>& b) {
    if (!(a.dims() == b.dims()) || a.cap() != b.cap()) return false;
    for (int L = 0; L < a.component_count(); ++L)
        if (!series_matches(a.component(L), b.component(L))) return false;
    return true;
}

template <class C>
struct NormalFormResult {
    Diffeo<C> phi;
    VectorField<C> nf;                       // S plus the accumulated resonant part
    std::vector<double> per_order_residuals; // conjugacy defects at orders 1..K
};

/// Order-by-order formal normalization: builds a tangent-to-identity Phi
/// and a resonant NF = S + N with T^k(D T^kPhi . NF) = T^k(F o T^kPhi) for
/// every k <= K. At each degree the known part G is sliced; its resonant
/// terms extend N, its nonresonant ones are divided by the (shifted)
/// divisor to extend the displacement. Resonant displacement coefficients
/// stay zero (minimal gauge).
template <class C>
NormalFormResult<C> normalize(const VectorField<C>& F, const QuasilinearData<C>& qd, int K,
                              const NormParams& reference) {
    if (!(F.dims() == qd.dims())) throw validation_error("normalize: dimension mismatch");
    if (K < 0 || K > F.cap()) throw validation_error("normalize: order exceeds field cap");

    const VectorField<C> S = make_S(qd, F.cap());
    if (!field_matches(quasilinear_part(F), S))
        throw math_error("normalize: quasilinear part of the input is not S");
    const VectorField<C> R = sub(F, S);
    if (!R.is_zero() && vf_order(R) < 1)
        throw math_error("normalize: perturbation must have quasi-order >= 1");

    VectorField<C> phi_bar = VectorField<C>::zero(F.dims(), F.cap());
    VectorField<C> N = VectorField<C>::zero(F.dims(), F.cap());
    std::vector<double> residuals;

    for (int k = 1; k <= K; ++k) {
        VectorField<C> known = sub(compose_with_diffeo(R, Diffeo<C>(phi_bar)), jacobian_apply(phi_bar, N));
        VectorField<C> G = vf_degree_slice(known, k);
        for (int L = 0; L < G.component_count(); ++L) {
            for (const auto& [idx, c] : G.component(L).terms()) {
                const C den = component_divisor(idx, qd, L);
                if (divisor_vanishes(den))
                    N.add_term(L, idx, c);
                else
                    phi_bar.add_term(L, idx, c / den);
            }
        }
        residuals.push_back(pushforward_residual(F, Diffeo<C>(phi_bar), add(S, N), k, reference));
    }

    return {Diffeo<C>(phi_bar), add(S, N), std::move(residuals)};
}

/// Tests NF = a * S through order k with the witness a recovered from the
/// first torus component with a nonzero frequency; returns the witness
/// (truncated at k, constant part 1) on success.
template <class C>
std::pair<bool, std::optional<Series<C>>> check_A_condition(const VectorField<C>& nf,
                                                            const QuasilinearData<C>& qd, int k) {
    using Traits = scalar_traits<C>;
    const Dims dims = qd.dims();
    if (k < 0 || k > nf.cap()) throw validation_error("check_A_condition: order out of range");

    int pivot = -1;
    for (int j = 0; j < dims.d; ++j) {
        if (!Traits::negligible(qd.omega[j])) {
            pivot = j;
            break;
        }
    }
    if (pivot < 0) throw math_error("check_A_condition: all frequencies vanish (unsupported configuration)");

    Series<C> a = scale(nf.component(pivot), Traits::one() / qd.omega[pivot]);
    const MultiIndex origin(std::vector<int>(dims.d, 0), std::vector<int>(dims.n, 0));
    if (!Traits::approx_equal(a.coeff(origin), Traits::one())) return {false, std::nullopt};

    const VectorField<C> candidate = scalar_times_field(a, make_S(qd, nf.cap()));
    if (!field_matches(vf_truncate(nf, k), vf_truncate(candidate, k))) return {false, std::nullopt};
    return {true, detail::project_q(a, k)};
}

/// A diffeomorphism is resonant through order k when every torus
/// displacement term with |Q| <= k has a vanishing divisor and every disk
/// displacement term with |Q| <= k+1 a vanishing shifted divisor.
template <class C>
bool check_resonant_diffeo(const Diffeo<C>& phi, const QuasilinearData<C>& qd, int k) {
    const VectorField<C>& disp = phi.displacement();
    for (int L = 0; L < disp.component_count(); ++L) {
        const int limit = disp.is_torus_component(L) ? k : k + 1;
        for (const auto& [idx, c] : disp.component(L).terms()) {
            if (idx.q_norm() > limit) continue;
            if (!divisor_vanishes(component_divisor(idx, qd, L))) return false;
        }
    }
    return true;
}

/// Dual check: every displacement term within order k nonresonant.
template <class C>
bool check_nonresonant_diffeo(const Diffeo<C>& phi, const QuasilinearData<C>& qd, int k) {
    const VectorField<C>& disp = phi.displacement();
    for (int L = 0; L < disp.component_count(); ++L) {
        const int limit = disp.is_torus_component(L) ? k : k + 1;
        for (const auto& [idx, c] : disp.component(L).terms()) {
            if (idx.q_norm() > limit) continue;
            if (divisor_vanishes(component_divisor(idx, qd, L))) return false;
        }
    }
    return true;
}

} // namespace tnf
