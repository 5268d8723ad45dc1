#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tnf/brjuno.hpp"
#include "tnf/homological.hpp"
#include "tnf/normal_form.hpp"

namespace tnf {

/// Schedule, derived sequences and report configuration shared by all
/// steps of one run.
struct IterationSettings {
    BrjunoSchedule sched;
    IterationParams params;
    NormParams reference;  // norm used for conjugacy residuals
    int split_maxQ = 0;    // frequency-split enumeration cap (0: cap + 1)
    double c_prime = 1.0;
    double c_nds = 1.0;
    bool evaluate_bounds = true;
};

/// State before step k: the resonant part nf (= a_k S when the
/// proportionality witness exists; nf includes S, so nf - S is the
/// accumulated correction) and the remainder rem of quasi-order >= m_k.
template <class C>
struct IterationState {
    int k = 0;
    VectorField<C> nf;
    VectorField<C> rem;
};

struct StepRecord {
    int k = 0;
    long long m_k = 0;
    long long m_next = 0;
    double norm_rem = 0.0;        // |R_k| at (r_k, delta_k)
    double norm_rem_ref = 0.0;    // |R_k| at the reference params
    double norm_nf_minus_S = 0.0; // |N_k - S| at (r_k, delta_k)
    double norm_phi = 0.0;        // |Phi_k - Id| at (r_{k+1}, delta_{k+1})
    double norm_dphi = 0.0;       // |DPhi_k - I| at (r_{k+1}, delta_{k+1})
    double zeta_k = 0.0;
    double zeta_next = 0.0;
    double eta_k = 0.0;
    bool rem_bound_ok = true;  // |R_k| <= zeta_k
    bool nf_bound_ok = true;   // |N_k - S| <= eta_k
    bool phi_bound_ok = true;  // |Phi_k - Id| <= zeta_{k+1}
    bool dphi_bound_ok = true; // |DPhi_k - I| <= zeta_{k+1}
    double step_residual = 0.0; // conjugacy defect of Phi_k at the cap
    double psi_residual = 0.0;  // conjugacy defect of Psi_k against the input
    double norm_dpsi = 0.0;     // |DPsi_k - I| at (r_{k+1}, delta_{k+1})
    bool dpsi_bound_ok = true;  // <= (1/8) e^{1/8}
    int rem_next_order = 0;
    bool rem_order_ok = true; // quasi-order of R_{k+1} >= m_{k+1}
    bool a_condition = false;
    std::optional<HomologicalReport> homological;
};

template <class C>
struct IterationTrace {
    std::vector<StepRecord> steps;
    IterationState<C> final_state;
    Diffeo<C> psi; // Phi_0 o ... o Phi_{last}
    bool reached_fixed_point = false;
};

namespace detail {

/// max_v |d_v (Phi - Id)| over all variables, each column measured like a
/// field norm.
template <class C>
double dphi_minus_identity_norm(const VectorField<C>& disp, const NormParams& p) {
    double worst = 0.0;
    const Dims dims = disp.dims();
    for (int L = 0; L < disp.component_count(); ++L) {
        for (int m = 0; m < dims.d; ++m)
            worst = std::max(worst, weighted_norm(dx(disp.component(L), m), p));
        for (int j = 0; j < dims.n; ++j)
            worst = std::max(worst, weighted_norm(dy(disp.component(L), j), p));
    }
    return worst;
}

/// Solves (I + DG) X = rhs by the finite Neumann sum; DG raises the
/// quasi-order by at least one, so the sum stops at the cap.
template <class C>
VectorField<C> neumann_solve(const VectorField<C>& G_disp, const VectorField<C>& rhs) {
    VectorField<C> result = rhs;
    VectorField<C> term = rhs;
    for (int j = 0; j <= rhs.cap() + 1 && !term.is_zero(); ++j) {
        term = scale(jacobian_apply(G_disp, term), -scalar_traits<C>::one());
        result = add(result, term);
    }
    return result;
}

} // namespace detail

/// One Newton step: removes the nonresonant quasi-orders [m_k, m_{k+1})
/// of the remainder through the homological equation, absorbs the
/// resonant ones into nf, and reconstructs the new remainder so that
/// Phi_k = Id + G_k conjugates exactly at the cap:
///   D Phi_k . (N_{k+1} + R_{k+1}) = (N_k + R_k) o Phi_k.
template <class C>
std::tuple<IterationState<C>, Diffeo<C>, StepRecord> iteration_step(const IterationState<C>& state,
                                                                    const QuasilinearData<C>& qd,
                                                                    const IterationSettings& settings) {
    const int k = state.k;
    const int cap = state.nf.cap();
    const int horizon = settings.sched.horizon();
    if (k + 1 >= horizon) throw validation_error("iteration_step: schedule horizon exhausted");
    const long long m_k = settings.sched.m.at(k);
    const long long m_next = settings.sched.m.at(k + 1);

    StepRecord rec;
    rec.k = k;
    rec.m_k = m_k;
    rec.m_next = m_next;
    rec.zeta_k = settings.params.zeta.at(k);
    rec.zeta_next = settings.params.zeta.at(k + 1);
    rec.eta_k = settings.params.eta.at(k);

    auto [holds, witness] = check_A_condition(state.nf, qd, cap);
    rec.a_condition = holds;
    if (!holds)
        throw math_error("iteration_step: the partial normal form is not proportional to S "
                         "(proportionality witness missing at step " + std::to_string(k) + ")");
    const Series<C> a_k = lift_cap(*witness, cap);

    const NormParams step_params(settings.sched.r.at(k), settings.params.delta.at(k));
    const NormParams next_params(settings.sched.r.at(k + 1), settings.params.delta.at(k + 1));
    rec.norm_rem = vf_norm(state.rem, step_params);
    rec.norm_rem_ref = vf_norm(state.rem, settings.reference);
    rec.norm_nf_minus_S = vf_norm(sub(state.nf, make_S(qd, cap)), step_params);
    rec.rem_bound_ok = rec.norm_rem <= rec.zeta_k;
    rec.nf_bound_ok = rec.norm_nf_minus_S <= rec.eta_k;

    if (!state.rem.is_zero() && vf_order_effective(state.rem) < m_k)
        throw math_error("iteration_step: remainder quasi-order " +
                         std::to_string(vf_order_effective(state.rem)) + " is below m_k = " +
                         std::to_string(m_k) +
                         "; the m-schedule outpaces the quadratic order gain of the step "
                         "(the doubling schedule m_k = 2^k keeps the hypothesis)");

    const int trunc_order = static_cast<int>(std::min<long long>(m_next - 1, cap));
    const VectorField<C> head = vf_truncate(state.rem, trunc_order);
    auto [head_res, head_nr] = decompose_resonant(head, qd);

    VectorField<C> G_disp = VectorField<C>::zero(state.nf.dims(), cap);
    if (!head_nr.is_zero()) {
        HomologicalProblem<C> prob{a_k, qd, head_nr, m_k, m_next,
                                   settings.split_maxQ > 0 ? settings.split_maxQ : cap + 1,
                                   std::nullopt};
        if (settings.evaluate_bounds) {
            HomologicalBounds b;
            b.r_k = settings.sched.r.at(k);
            b.r_next = settings.sched.r.at(k + 1);
            b.delta_k = settings.params.delta.at(k);
            b.delta_next = settings.params.delta.at(k + 1);
            b.g_mk = settings.sched.g_at(k);
            b.eps_k = settings.sched.eps.at(k);
            b.c_omega = settings.params.c_omega;
            b.c_prime = settings.c_prime;
            b.c_nds = settings.c_nds;
            prob.bounds = b;
        }
        auto [G_solve, report] = solve_homological(prob);
        rec.homological = report;
        G_disp = scale(G_solve, -scalar_traits<C>::one());
    }
    const Diffeo<C> phi(G_disp);

    // (I + DG) R_{k+1} = -DG.(resonant head) + (R_k - head) + DR_k.G
    //                    + [ (R_k+N_k) o Phi - (R_k+N_k) - D(R_k+N_k).G ]
    const VectorField<C> old_field = add(state.nf, state.rem);
    VectorField<C> rhs = sub(state.rem, head);
    rhs = sub(rhs, jacobian_apply(G_disp, head_res));
    rhs = add(rhs, jacobian_apply(state.rem, G_disp));
    VectorField<C> tail = compose_with_diffeo(old_field, phi);
    tail = sub(tail, old_field);
    tail = sub(tail, jacobian_apply(old_field, G_disp));
    rhs = add(rhs, tail);

    IterationState<C> next{k + 1, add(state.nf, head_res), detail::neumann_solve(G_disp, rhs)};

    rec.norm_phi = vf_norm(G_disp, next_params);
    rec.norm_dphi = detail::dphi_minus_identity_norm(G_disp, next_params);
    rec.phi_bound_ok = rec.norm_phi <= rec.zeta_next;
    rec.dphi_bound_ok = rec.norm_dphi <= rec.zeta_next;
    rec.rem_next_order = vf_order_effective(next.rem);
    rec.rem_order_ok = rec.rem_next_order >= m_next;
    rec.step_residual =
        pushforward_residual(old_field, phi, add(next.nf, next.rem), cap, settings.reference);

    return {std::move(next), phi, std::move(rec)};
}

/// Runs the Newton iteration from F = S + R, composing Psi_k and checking
/// the accumulated conjugacy back to F; stops early at an exact fixed
/// point (zero remainder).
template <class C>
IterationTrace<C> run_iteration(const VectorField<C>& F, const QuasilinearData<C>& qd,
                                const IterationSettings& settings, int steps) {
    const VectorField<C> S = make_S(qd, F.cap());
    if (!field_matches(quasilinear_part(F), S))
        throw math_error("run_iteration: quasilinear part of the input is not S");
    const VectorField<C> R0 = sub(F, S);
    if (!R0.is_zero() && vf_order(R0) < 1)
        throw math_error("run_iteration: perturbation must have quasi-order >= 1");

    IterationTrace<C> trace{{}, {0, S, R0}, Diffeo<C>::identity(F.dims(), F.cap()), false};
    VectorField<C> psi_bar = VectorField<C>::zero(F.dims(), F.cap());

    for (int s = 0; s < steps; ++s) {
        if (trace.final_state.rem.is_zero()) {
            trace.reached_fixed_point = true;
            break;
        }
        auto [next, phi, rec] = iteration_step(trace.final_state, qd, settings);
        // Psi_new = Psi_old o Phi: displacement G + (Psi_old - Id) o Phi
        psi_bar = add(phi.displacement(), compose_with_diffeo(psi_bar, phi));
        trace.psi = Diffeo<C>(psi_bar);
        const NormParams next_params(settings.sched.r.at(next.k), settings.params.delta.at(next.k));
        rec.psi_residual = pushforward_residual(F, trace.psi, add(next.nf, next.rem), F.cap(),
                                                settings.reference);
        rec.norm_dpsi = detail::dphi_minus_identity_norm(psi_bar, next_params);
        rec.dpsi_bound_ok = rec.norm_dpsi <= 0.125 * std::exp(0.125);
        trace.steps.push_back(std::move(rec));
        trace.final_state = std::move(next);
    }
    if (!trace.reached_fixed_point && trace.final_state.rem.is_zero())
        trace.reached_fixed_point = true;
    return trace;
}

} // namespace tnf
