#include "dispatch.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tnf/iteration.hpp"
#include "tnf/normal_form.hpp"

namespace tnf {

namespace {

using ojson = nlohmann::ordered_json;

void apply_common(const CommonOptions& common) {
    if (common.tol >= 0.0) {
        float_config::comparison_tol() = common.tol;
        float_config::resonance_tol() = common.tol;
    }
}

std::string effective_backend(const SystemSpec& spec, const CommonOptions& common) {
    if (common.backend_override.empty()) return spec.backend;
    if (common.backend_override != "exact" && common.backend_override != "float")
        throw validation_error("--backend must be exact or float");
    return common.backend_override;
}

template <class C>
std::array<std::string, 2> coeff_strings(const C& v) {
    if constexpr (scalar_traits<C>::exact) {
        return {rational_str(v.re), rational_str(v.im)};
    } else {
        return {format_double(v.real()), format_double(v.imag())};
    }
}

std::string int_list(const std::vector<int>& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s + ")";
}

template <class C>
std::string coeff_text(const C& v) {
    const auto [re, im] = coeff_strings(v);
    if (im == "0") return re;
    return "[" + re + ", " + im + "]";
}

template <class C>
ojson series_terms_json(const Series<C>& s) {
    ojson arr = ojson::array();
    for (const auto& [idx, c] : s.terms()) {
        ojson t;
        t["P"] = idx.P;
        t["Q"] = idx.Q;
        const auto [re, im] = coeff_strings(c);
        t["coeff"] = {re, im};
        arr.push_back(std::move(t));
    }
    return arr;
}

template <class C>
ojson field_terms_json(const VectorField<C>& F) {
    ojson arr = ojson::array();
    for (int L = 0; L < F.component_count(); ++L) {
        for (const auto& [idx, c] : F.component(L).terms()) {
            ojson t;
            t["component"] = L + 1;
            t["P"] = idx.P;
            t["Q"] = idx.Q;
            const auto [re, im] = coeff_strings(c);
            t["coeff"] = {re, im};
            arr.push_back(std::move(t));
        }
    }
    return arr;
}

template <class C>
void field_terms_text(std::ostringstream& out, const VectorField<C>& F, const char* indent) {
    bool any = false;
    for (int L = 0; L < F.component_count(); ++L) {
        for (const auto& [idx, c] : F.component(L).terms()) {
            out << indent << "component " << (L + 1) << "  P=" << int_list(idx.P)
                << " Q=" << int_list(idx.Q) << "  " << coeff_text(c) << "\n";
            any = true;
        }
    }
    if (!any) out << indent << "(none)\n";
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

std::vector<long long> parse_int_list(const std::string& text) {
    std::vector<long long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoll(item));
    }
    return out;
}

/// Enumeration cost guard for the divisor-box g preset.
void check_box_feasible(long long m, int d, int n) {
    double cost = 1.0;
    for (int j = 0; j < d; ++j) cost *= 2.0 * static_cast<double>(m) + 1.0;
    for (int j = 0; j < n; ++j) cost *= static_cast<double>(m) + 1.0;
    if (cost > 2e6)
        throw validation_error("the divisor-box preset for g is infeasible at m = " +
                               std::to_string(m) + "; pass --gform or --gtable");
}

template <class C>
BrjunoSchedule assemble_schedule(const QuasilinearData<C>* qd, const ScheduleOptions& opts,
                                 int horizon) {
    BrjunoSchedule sched;
    if (opts.mk == "doubling") {
        sched.m = make_m_schedule(MSchedule::doubling, horizon);
    } else if (opts.mk == "saturating") {
        sched.m = make_m_schedule(MSchedule::saturating, horizon);
    } else {
        sched.m = parse_int_list(opts.mk);
        if (static_cast<int>(sched.m.size()) < horizon)
            throw validation_error("--mk list has fewer than " + std::to_string(horizon) + " entries");
        sched.m.resize(horizon);
    }

    if (!opts.gform.empty()) {
        sched.g = parse_gform(opts.gform);
    } else if (!opts.gtable_path.empty()) {
        std::ifstream in(opts.gtable_path);
        if (!in) throw validation_error("cannot open g table file '" + opts.gtable_path + "'");
        ojson data;
        try {
            data = ojson::parse(in);
        } catch (const nlohmann::json::parse_error& err) {
            throw validation_error("g table file is not valid JSON: " + std::string(err.what()));
        }
        std::map<long long, double> table;
        for (const auto& row : data) {
            if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
                throw validation_error("g table rows must be [m, g] number pairs");
            table[row[0].get<long long>()] = row[1].get<double>();
        }
        sched.g = GFunction::table(std::move(table));
    } else if (qd != nullptr) {
        // the growth function realized by the frequencies themselves:
        // max inverse nonresonant divisor over the |P|,|Q| <= m box
        std::map<long long, double> table;
        for (long long m : sched.m) {
            check_box_feasible(m, qd->dims().d, qd->dims().n);
            table[m] = std::max(1.0, g_of_m(*qd, static_cast<int>(m)));
        }
        sched.g = GFunction::table(std::move(table));
    } else {
        throw validation_error("--gform or --gtable is required when no system file is given");
    }

    if (opts.eps == "aurouet") {
        sched.eps = aurouet_epsilons(horizon);
    } else {
        sched.eps = parse_double_list(opts.eps);
        if (sched.eps.empty()) throw validation_error("--eps list is empty");
        while (static_cast<int>(sched.eps.size()) < horizon) sched.eps.push_back(sched.eps.back());
    }

    if (opts.rseq.empty()) {
        sched.r = default_widths(horizon);
    } else {
        sched.r = parse_double_list(opts.rseq);
        if (static_cast<int>(sched.r.size()) < horizon)
            throw validation_error("--rseq list has fewer than " + std::to_string(horizon) + " entries");
    }
    return sched;
}

template <class C>
IterationParams assemble_params(const QuasilinearData<C>& qd, const BrjunoSchedule& sched,
                                const ScheduleOptions& opts) {
    const double delta0 = opts.delta0 >= 0.0 ? opts.delta0 : std::min(1.0, qd.c_omega());
    if (opts.zeta0 >= 0.0) return build_params(qd, sched, delta0, opts.zeta0, opts.cs2);
    // default zeta0: harmless fraction of the smallness bound
    IterationParams probe = build_params(qd, sched, delta0, 0.0, opts.cs2);
    return build_params(qd, sched, delta0, 0.9 * probe.zeta0_bound, opts.cs2);
}

// ---------------------------------------------------------------- resonances

template <class C>
CommandResult run_resonances(const SystemSpec& spec, int maxP, int maxQ,
                             const CommonOptions& common) {
    const auto qd = build_quasilinear<C>(spec);
    const auto cls = enumerate_classes(qd, maxP, maxQ);

    if (common.format == "json") {
        ojson out;
        out["command"] = "resonances";
        out["backend"] = effective_backend(spec, common);
        out["maxP"] = maxP;
        out["maxQ"] = maxQ;
        ojson arr = ojson::array();
        for (const auto& c : cls.classes) {
            ojson e;
            const auto [re, im] = coeff_strings(c.value);
            e["divisor"] = {re, im};
            e["resonant"] = c.zero_class;
            e["min_abs_P"] = c.min_p_norm;
            ojson members = ojson::array();
            for (const auto& idx : c.members) members.push_back({{"P", idx.P}, {"Q", idx.Q}});
            e["members"] = std::move(members);
            arr.push_back(std::move(e));
        }
        out["classes"] = std::move(arr);
        return {0, out.dump(2) + "\n"};
    }

    std::ostringstream out;
    out << "resonance classes for |P| <= " << maxP << ", |Q| <= " << maxQ << " (" << cls.classes.size()
        << " classes, " << cls.total_members() << " indices)\n";
    for (const auto& c : cls.classes) {
        out << "  divisor " << coeff_text(c.value) << (c.zero_class ? "  [resonant]" : "") << "  size "
            << c.members.size() << "\n";
        for (const auto& idx : c.members) out << "    " << index_str(idx) << "\n";
    }
    return {0, out.str()};
}

// ----------------------------------------------------------------- normalize

template <class C>
ojson normalize_json(const SystemSpec& spec, const CommonOptions& common, int order) {
    const auto qd = build_quasilinear<C>(spec);
    const auto F = build_field<C>(spec, qd);
    const NormParams ref(spec.r0, spec.delta0);
    const auto result = normalize(F, qd, order, ref);
    auto [holds, witness] = check_A_condition(result.nf, qd, order);

    ojson out;
    out["command"] = "normalize";
    out["backend"] = effective_backend(spec, common);
    out["d"] = spec.d;
    out["n"] = spec.n;
    out["cap"] = spec.cap;
    out["order"] = order;
    out["reference_norm"] = {{"r", spec.r0}, {"delta", spec.delta0}};
    out["nf"] = field_terms_json(result.nf);
    out["phi"] = field_terms_json(result.phi.displacement());
    out["residuals"] = result.per_order_residuals;
    ojson ac;
    ac["holds"] = holds;
    if (holds) ac["witness"] = series_terms_json(*witness);
    out["a_condition"] = std::move(ac);
    return out;
}

template <class C>
CommandResult run_normalize(const SystemSpec& spec, int order, const CommonOptions& common) {
    if (common.format == "json") return {0, normalize_json<C>(spec, common, order).dump(2) + "\n"};

    const auto qd = build_quasilinear<C>(spec);
    const auto F = build_field<C>(spec, qd);
    const NormParams ref(spec.r0, spec.delta0);
    const auto result = normalize(F, qd, order, ref);
    auto [holds, witness] = check_A_condition(result.nf, qd, order);

    std::ostringstream out;
    out << "normalize: d=" << spec.d << " n=" << spec.n << " cap=" << spec.cap << " order=" << order
        << " backend=" << effective_backend(spec, common) << "\n";
    out << "normal form terms:\n";
    field_terms_text(out, result.nf, "  ");
    out << "diffeomorphism displacement terms:\n";
    field_terms_text(out, result.phi.displacement(), "  ");
    out << "per-order conjugacy residuals at (r=" << format_double(spec.r0)
        << ", delta=" << format_double(spec.delta0) << "):\n";
    for (std::size_t k = 0; k < result.per_order_residuals.size(); ++k)
        out << "  order " << (k + 1) << ": " << format_double(result.per_order_residuals[k]) << "\n";
    out << "proportionality to S (A-condition): " << (holds ? "holds" : "fails") << "\n";
    if (holds) {
        out << "witness terms:\n";
        for (const auto& [idx, c] : witness->terms())
            out << "  P=" << int_list(idx.P) << " Q=" << int_list(idx.Q) << "  " << coeff_text(c) << "\n";
    }
    return {0, out.str()};
}

// -------------------------------------------------------------------- brjuno

ojson assumption_json(const AssumptionReport& rep) {
    ojson arr = ojson::array();
    for (int i = 0; i < 7; ++i) {
        ojson item;
        item["item"] = i + 1;
        item["checked"] = rep.item[i].checked;
        if (rep.item[i].checked) item["pass"] = rep.item[i].pass;
        if (!rep.item[i].detail.empty()) item["detail"] = rep.item[i].detail;
        arr.push_back(std::move(item));
    }
    return arr;
}

template <class C>
CommandResult run_brjuno(const SystemSpec* spec, const ScheduleOptions& opts, int terms, int maxP,
                         int kmax, const CommonOptions& common) {
    std::optional<QuasilinearData<C>> qd;
    if (spec) qd = build_quasilinear<C>(*spec);

    int check_k = kmax >= 0 ? kmax : 6;
    int terms_eff = terms;
    std::string clamp_note;
    if (opts.gform.empty() && opts.gtable_path.empty() && qd) {
        // the divisor-box preset enumerates |P|,|Q| <= m_k; clamp the
        // horizon to what that enumeration can afford
        std::vector<long long> m_probe;
        if (opts.mk == "doubling" || opts.mk == "saturating") {
            m_probe = make_m_schedule(opts.mk == "doubling" ? MSchedule::doubling
                                                            : MSchedule::saturating,
                                      std::max(terms + 1, check_k + 2));
        } else {
            m_probe = parse_int_list(opts.mk);
        }
        if (!m_probe.empty()) {
            int feasible = 0;
            for (std::size_t k = 0; k < m_probe.size(); ++k) {
                double cost = 1.0;
                for (int j = 0; j < qd->dims().d; ++j) cost *= 2.0 * m_probe[k] + 1.0;
                for (int j = 0; j < qd->dims().n; ++j) cost *= m_probe[k] + 1.0;
                if (cost > 2e6) break;
                feasible = static_cast<int>(k);
            }
            if (feasible < 1)
                throw validation_error("the divisor-box preset for g is infeasible even at m_1; "
                                       "pass --gform or --gtable");
            if (terms_eff > feasible) {
                terms_eff = feasible;
                clamp_note = "divisor-box preset: sum truncated at " + std::to_string(feasible) +
                             " terms (pass --gform or --gtable for longer sums)";
            }
            check_k = std::min(check_k, feasible);
        }
    }
    const int horizon = std::max(terms_eff + 1, check_k + 2);
    const BrjunoSchedule sched = assemble_schedule<C>(qd ? &*qd : nullptr, opts, horizon);
    const BrjunoSum sum = brjuno_sum(sched, terms_eff);
    const AssumptionReport rep = check_assumption<C>(qd ? &*qd : nullptr, sched, check_k, maxP);

    std::optional<IterationParams> params;
    if (qd) params = assemble_params(*qd, sched, opts);

    if (common.format == "json") {
        ojson out;
        out["command"] = "brjuno";
        out["g"] = sched.g.describe();
        if (!clamp_note.empty()) out["note"] = clamp_note;
        out["terms"] = sum.terms;
        out["B_partial"] = sum.partial;
        out["last_term"] = sum.last_term;
        out["assumption"] = assumption_json(rep);
        ojson sv;
        sv["m"] = std::vector<long long>(sched.m.begin(), sched.m.begin() + std::min(horizon, 12));
        sv["eps"] = std::vector<double>(sched.eps.begin(), sched.eps.begin() + std::min(horizon, 12));
        sv["r"] = std::vector<double>(sched.r.begin(), sched.r.begin() + std::min(horizon, 12));
        out["schedule_head"] = std::move(sv);
        if (params) {
            ojson pj;
            pj["delta"] = std::vector<double>(params->delta.begin(),
                                              params->delta.begin() + std::min(horizon, 12));
            pj["zeta"] = std::vector<double>(params->zeta.begin(),
                                             params->zeta.begin() + std::min(horizon, 12));
            pj["eta"] = std::vector<double>(params->eta.begin(),
                                            params->eta.begin() + std::min(horizon, 12));
            pj["zeta0_bound"] = params->zeta0_bound;
            pj["zeta0_ok"] = params->zeta0_ok;
            pj["eta_le_eighth"] = params->eta_le_eighth;
            pj["zeta_decreasing"] = params->zeta_decreasing;
            out["parameters"] = std::move(pj);
        }
        const bool violation = !std::all_of(std::begin(rep.item), std::end(rep.item),
                                            [](const AssumptionItem& it) { return !it.checked || it.pass; });
        return {common.strict && violation ? 4 : 0, out.dump(2) + "\n"};
    }

    std::ostringstream out;
    out << "brjuno: g = " << sched.g.describe() << "\n";
    if (!clamp_note.empty()) out << "note: " << clamp_note << "\n";
    out << "partial sum B over " << sum.terms << " terms: " << format_double(sum.partial)
        << " (last term " << format_double(sum.last_term) << ")\n";
    static const char* names[7] = {
        "m_0 = 1 and m_{k+1} <= 2 m_k + 1",
        "Brjuno sum partial",
        "(n+2) g(m_k) ln g(m_k) >= m_k",
        "high-frequency inverse divisors <= e^{eps_k |P|}",
        "low-frequency inverse divisors <= g(m_k)",
        "4^{4d+6} (r_k - r_{k+1} - eps_k)^{-4d-6} <= g(m_k)",
        "r_k > 1/2",
    };
    bool violation = false;
    for (int i = 0; i < 7; ++i) {
        out << "  item " << (i + 1) << " [" << names[i] << "]: ";
        if (!rep.item[i].checked) {
            out << "not checked";
        } else {
            out << (rep.item[i].pass ? "pass" : "FAIL");
            if (!rep.item[i].pass) violation = true;
        }
        if (!rep.item[i].detail.empty()) out << "  (" << rep.item[i].detail << ")";
        out << "\n";
    }
    out << "  items 4-5 box: |P| <= " << maxP << ", |Q| <= m_k, k <= " << rep.k_checked << "\n";
    out << "schedule head (k: m_k, eps_k, r_k, g(m_k)):\n";
    for (int k = 0; k < std::min(horizon, 8); ++k)
        out << "  " << k << ": " << sched.m[k] << ", " << format_double(sched.eps[k]) << ", "
            << format_double(sched.r[k]) << ", " << format_double(sched.g_at(k)) << "\n";
    if (params) {
        out << "derived parameters (k: delta_k, zeta_k, eta_k):\n";
        for (int k = 0; k < std::min(horizon, 8); ++k)
            out << "  " << k << ": " << format_double(params->delta[k]) << ", "
                << format_double(params->zeta[k]) << ", " << format_double(params->eta[k]) << "\n";
        out << "zeta_0 bound " << format_double(params->zeta0_bound) << " satisfied: "
            << (params->zeta0_ok ? "yes" : "no") << "; eta <= 1/8: "
            << (params->eta_le_eighth ? "yes" : "no") << "; zeta decreasing: "
            << (params->zeta_decreasing ? "yes" : "no") << "\n";
    }
    return {common.strict && violation ? 4 : 0, out.str()};
}

// ------------------------------------------------------------------- iterate

template <class C>
CommandResult run_iterate(const SystemSpec& spec, const ScheduleOptions& opts, int steps,
                          int split_maxQ, const CommonOptions& common) {
    if (steps < 1) throw validation_error("--steps must be >= 1");
    const auto qd = build_quasilinear<C>(spec);
    const auto F = build_field<C>(spec, qd);

    IterationSettings settings{assemble_schedule<C>(&qd, opts, steps + 1), IterationParams{},
                               NormParams(spec.r0, spec.delta0),
                               split_maxQ > 0 ? split_maxQ : spec.cap + 1, 1.0, 1.0, true};
    settings.params = assemble_params(qd, settings.sched, opts);

    const auto trace = run_iteration(F, qd, settings, steps);

    bool violation = false;
    for (const auto& rec : trace.steps) {
        violation = violation || !rec.rem_bound_ok || !rec.nf_bound_ok || !rec.phi_bound_ok ||
                    !rec.dphi_bound_ok || !rec.dpsi_bound_ok || !rec.rem_order_ok;
        if (rec.homological)
            violation = violation || !rec.homological->bound_G0_ok || !rec.homological->bound_Ginf_ok ||
                        !rec.homological->a_k_close_to_one;
    }

    if (common.format == "json") {
        ojson out;
        out["command"] = "iterate";
        out["backend"] = effective_backend(spec, common);
        out["steps_requested"] = steps;
        out["steps_run"] = trace.steps.size();
        out["fixed_point"] = trace.reached_fixed_point;
        ojson arr = ojson::array();
        for (const auto& rec : trace.steps) {
            ojson r;
            r["k"] = rec.k;
            r["m_k"] = rec.m_k;
            r["m_next"] = rec.m_next;
            r["norm_rem"] = rec.norm_rem;
            r["norm_rem_reference"] = rec.norm_rem_ref;
            r["norm_nf_minus_S"] = rec.norm_nf_minus_S;
            r["norm_phi_minus_id"] = rec.norm_phi;
            r["norm_dphi_minus_id"] = rec.norm_dphi;
            r["zeta_k"] = rec.zeta_k;
            r["zeta_next"] = rec.zeta_next;
            r["eta_k"] = rec.eta_k;
            r["rem_bound_ok"] = rec.rem_bound_ok;
            r["nf_bound_ok"] = rec.nf_bound_ok;
            r["phi_bound_ok"] = rec.phi_bound_ok;
            r["dphi_bound_ok"] = rec.dphi_bound_ok;
            r["step_residual"] = rec.step_residual;
            r["psi_residual"] = rec.psi_residual;
            r["norm_dpsi_minus_id"] = rec.norm_dpsi;
            r["dpsi_bound_ok"] = rec.dpsi_bound_ok;
            r["rem_next_order"] = rec.rem_next_order;
            r["rem_order_ok"] = rec.rem_order_ok;
            if (rec.homological) {
                ojson h;
                h["norm_G0"] = rec.homological->norm_G0;
                h["norm_Ginf"] = rec.homological->norm_Ginf;
                h["bound_G0"] = rec.homological->bound_G0;
                h["bound_Ginf"] = rec.homological->bound_Ginf;
                h["bound_G0_ok"] = rec.homological->bound_G0_ok;
                h["bound_Ginf_ok"] = rec.homological->bound_Ginf_ok;
                h["bracket_residual"] = rec.homological->bracket_residual;
                h["low_terms"] = rec.homological->low_terms;
                h["high_terms"] = rec.homological->high_terms;
                h["split_maxQ"] = rec.homological->split_maxQ;
                r["homological"] = std::move(h);
            }
            arr.push_back(std::move(r));
        }
        out["trace"] = std::move(arr);
        out["final_nf"] = field_terms_json(trace.final_state.nf);
        out["final_remainder"] = field_terms_json(trace.final_state.rem);
        out["psi"] = field_terms_json(trace.psi.displacement());
        return {common.strict && violation ? 4 : 0, out.dump(2) + "\n"};
    }

    std::ostringstream out;
    out << "iterate: steps requested " << steps << ", run " << trace.steps.size()
        << (trace.reached_fixed_point ? " (fixed point reached)" : "") << "\n";
    for (const auto& rec : trace.steps) {
        out << "step k=" << rec.k << "  orders [" << rec.m_k << ", " << rec.m_next << ")\n";
        out << "  |R_k| = " << format_double(rec.norm_rem) << " (zeta_k " << format_double(rec.zeta_k)
            << ", " << (rec.rem_bound_ok ? "ok" : "VIOLATED") << ")";
        out << "  |N_k - S| = " << format_double(rec.norm_nf_minus_S) << " (eta_k "
            << format_double(rec.eta_k) << ", " << (rec.nf_bound_ok ? "ok" : "VIOLATED") << ")\n";
        out << "  |Phi_k - Id| = " << format_double(rec.norm_phi) << ", |DPhi_k - I| = "
            << format_double(rec.norm_dphi) << " (zeta_{k+1} " << format_double(rec.zeta_next) << ", "
            << (rec.phi_bound_ok && rec.dphi_bound_ok ? "ok" : "VIOLATED") << ")\n";
        out << "  residuals: step " << format_double(rec.step_residual) << ", composed "
            << format_double(rec.psi_residual) << "; |DPsi - I| = " << format_double(rec.norm_dpsi)
            << (rec.dpsi_bound_ok ? " (ok)" : " (VIOLATED)") << "\n";
        out << "  next remainder quasi-order " << rec.rem_next_order << " (need >= " << rec.m_next
            << ": " << (rec.rem_order_ok ? "ok" : "VIOLATED") << ")\n";
        if (rec.homological) {
            out << "  homological: |G0| = " << format_double(rec.homological->norm_G0)
                << (rec.homological->bounds_evaluated
                        ? " (bound " + format_double(rec.homological->bound_G0) + ")"
                        : "")
                << ", |Ginf| = " << format_double(rec.homological->norm_Ginf)
                << (rec.homological->bounds_evaluated
                        ? " (bound " + format_double(rec.homological->bound_Ginf) + ")"
                        : "")
                << ", bracket residual " << format_double(rec.homological->bracket_residual) << "\n";
        }
    }
    out << "final normal form terms:\n";
    field_terms_text(out, trace.final_state.nf, "  ");
    out << "final remainder terms: " << [&] {
        std::size_t c = 0;
        for (int L = 0; L < trace.final_state.rem.component_count(); ++L)
            c += trace.final_state.rem.component(L).term_count();
        return c;
    }() << "\n";
    return {common.strict && violation ? 4 : 0, out.str()};
}

// -------------------------------------------------------------------- verify

template <class C>
void ingest_terms(VectorField<C>& F, const ojson& arr, const std::string& path, int d, int n) {
    if (!arr.is_array()) throw validation_error(path + ": expected an array of terms");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& t = arr[i];
        const std::string tpath = path + "[" + std::to_string(i) + "]";
        if (!t.contains("component") || !t.contains("P") || !t.contains("Q") || !t.contains("coeff"))
            throw validation_error(tpath + ": term needs component, P, Q, coeff");
        const int L = t["component"].get<int>() - 1;
        if (L < 0 || L >= d + n) throw validation_error(tpath + ".component: out of range");
        std::vector<int> P = t["P"].get<std::vector<int>>();
        std::vector<int> Q = t["Q"].get<std::vector<int>>();
        const auto& c = t["coeff"];
        if (!c.is_array() || c.size() != 2) throw validation_error(tpath + ".coeff: expected [re, im]");
        const NumberSpec re = NumberSpec::of_text(c[0].get<std::string>());
        const NumberSpec im = NumberSpec::of_text(c[1].get<std::string>());
        F.add_term(L, MultiIndex(std::move(P), std::move(Q)), to_scalar<C>(re, im));
    }
}

template <class C>
CommandResult run_verify(const SystemSpec& spec, const std::string& result_json,
                         const CommonOptions& common) {
    ojson result;
    try {
        result = ojson::parse(result_json);
    } catch (const nlohmann::json::parse_error& err) {
        throw validation_error(std::string("result file is not valid JSON: ") + err.what());
    }
    for (const char* key : {"command", "d", "n", "cap", "order", "nf", "phi"})
        if (!result.contains(key)) throw validation_error(std::string("result file: missing ") + key);
    if (result["command"].get<std::string>() != "normalize")
        throw validation_error("result file: expected the output of `normalize --format json`");
    if (result["d"].get<int>() != spec.d || result["n"].get<int>() != spec.n ||
        result["cap"].get<int>() != spec.cap)
        throw validation_error("result file: (d, n, cap) do not match the input system");
    const int order = result["order"].get<int>();

    const auto qd = build_quasilinear<C>(spec);
    const auto F = build_field<C>(spec, qd);
    VectorField<C> nf(F.dims(), spec.cap);
    VectorField<C> phi_bar(F.dims(), spec.cap);
    ingest_terms(nf, result["nf"], "nf", spec.d, spec.n);
    ingest_terms(phi_bar, result["phi"], "phi", spec.d, spec.n);
    const Diffeo<C> phi(phi_bar);

    const NormParams ref(spec.r0, spec.delta0);
    const double norm_scale = std::max(1.0, vf_norm(F, ref));
    const double tol = scalar_traits<C>::exact ? 0.0 : float_config::comparison_tol() * norm_scale;

    std::vector<double> residuals;
    double worst = 0.0;
    for (int k = 1; k <= order; ++k) {
        residuals.push_back(pushforward_residual(F, phi, nf, k, ref));
        worst = std::max(worst, residuals.back());
    }
    auto [resonant_part, nonres_part] = decompose_resonant(sub(nf, make_S(qd, spec.cap)), qd);
    const bool nf_resonant = nonres_part.is_zero();
    const bool pass = worst <= tol && nf_resonant;

    if (common.format == "json") {
        ojson out;
        out["command"] = "verify";
        out["backend"] = effective_backend(spec, common);
        out["order"] = order;
        out["residuals"] = residuals;
        out["max_residual"] = worst;
        out["tolerance"] = tol;
        out["nf_minus_S_resonant"] = nf_resonant;
        out["pass"] = pass;
        return {pass ? 0 : 3, out.dump(2) + "\n"};
    }
    std::ostringstream out;
    out << "verify: order " << order << "\n";
    for (int k = 1; k <= order; ++k)
        out << "  order " << k << " residual: " << format_double(residuals[k - 1]) << "\n";
    out << "  NF - S resonant: " << (nf_resonant ? "yes" : "NO") << "\n";
    out << (pass ? "PASS" : "FAIL") << " (max residual " << format_double(worst) << ", tolerance "
        << format_double(tol) << ")\n";
    return {pass ? 0 : 3, out.str()};
}

} // namespace

CommandResult cmd_resonances(const SystemSpec& spec, int maxP, int maxQ, const CommonOptions& common) {
    apply_common(common);
    if (maxP < 0 || maxQ < 0) throw validation_error("resonances requires --maxP and --maxQ");
    if (effective_backend(spec, common) == "exact")
        return run_resonances<GaussianRational>(spec, maxP, maxQ, common);
    return run_resonances<std::complex<double>>(spec, maxP, maxQ, common);
}

CommandResult cmd_normalize(const SystemSpec& spec, int order, const CommonOptions& common) {
    apply_common(common);
    const int effective_order = order >= 0 ? order : spec.cap;
    if (effective_backend(spec, common) == "exact")
        return run_normalize<GaussianRational>(spec, effective_order, common);
    return run_normalize<std::complex<double>>(spec, effective_order, common);
}

CommandResult cmd_brjuno(const SystemSpec* spec, const ScheduleOptions& opts, int terms, int maxP,
                         int kmax, const CommonOptions& common) {
    apply_common(common);
    const std::string backend = spec ? effective_backend(*spec, common)
                                     : (common.backend_override == "float" ? "float" : "exact");
    if (backend == "exact") return run_brjuno<GaussianRational>(spec, opts, terms, maxP, kmax, common);
    return run_brjuno<std::complex<double>>(spec, opts, terms, maxP, kmax, common);
}

CommandResult cmd_iterate(const SystemSpec& spec, const ScheduleOptions& opts, int steps,
                          int split_maxQ, const CommonOptions& common) {
    apply_common(common);
    if (effective_backend(spec, common) == "exact")
        return run_iterate<GaussianRational>(spec, opts, steps, split_maxQ, common);
    return run_iterate<std::complex<double>>(spec, opts, steps, split_maxQ, common);
}

CommandResult cmd_verify(const SystemSpec& spec, const std::string& result_json,
                         const CommonOptions& common) {
    apply_common(common);
    if (effective_backend(spec, common) == "exact")
        return run_verify<GaussianRational>(spec, result_json, common);
    return run_verify<std::complex<double>>(spec, result_json, common);
}

} // namespace tnf
