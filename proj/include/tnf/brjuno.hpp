#pragma once

#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tnf/quasilinear.hpp"
#include "tnf/radii.hpp"
#include "tnf/resonance.hpp"

namespace tnf {

/// The arithmetic growth function g: either the closed form C*m^tau or an
/// explicit table on the m-values.
class GFunction {
public:
    static GFunction power_form(double coeff, double tau) {
        GFunction g;
        g.coeff_ = coeff;
        g.tau_ = tau;
        g.kind_ = Kind::power;
        return g;
    }

    static GFunction table(std::map<long long, double> values) {
        GFunction g;
        g.table_ = std::move(values);
        g.kind_ = Kind::table;
        return g;
    }

    double operator()(long long m) const {
        if (kind_ == Kind::power) return coeff_ * std::pow(static_cast<double>(m), tau_);
        auto it = table_.find(m);
        if (it == table_.end())
            throw validation_error("g table has no entry for m = " + std::to_string(m));
        return it->second;
    }

    std::string describe() const {
        if (kind_ == Kind::power)
            return format_double(coeff_) + "*m^" + format_double(tau_);
        return "table(" + std::to_string(table_.size()) + " entries)";
    }

private:
    enum class Kind { power, table };
    Kind kind_ = Kind::power;
    double coeff_ = 1.0;
    double tau_ = 0.0;
    std::map<long long, double> table_;
};

/// Parses "C*m^tau" (e.g. "2*m^3", "m^2", "1.5*m^0.5").
inline GFunction parse_gform(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    double coeff = 1.0;
    std::string rest = s;
    const auto star = s.find("*");
    if (star != std::string::npos) {
        coeff = std::stod(s.substr(0, star));
        rest = s.substr(star + 1);
    }
    if (rest == "m") return GFunction::power_form(coeff, 1.0);
    if (rest.rfind("m^", 0) != 0)
        throw validation_error("g form must look like \"C*m^tau\", got '" + text + "'");
    return GFunction::power_form(coeff, std::stod(rest.substr(2)));
}

enum class MSchedule { doubling, saturating };

/// m_k = 2^k, or the saturating schedule m_{k+1} = 2 m_k + 1.
inline std::vector<long long> make_m_schedule(MSchedule kind, int count) {
    if (count < 1) throw validation_error("m schedule needs at least one entry");
    std::vector<long long> m(count);
    m[0] = 1;
    for (int k = 1; k < count; ++k)
        m[k] = (kind == MSchedule::doubling) ? 2 * m[k - 1] : 2 * m[k - 1] + 1;
    return m;
}

/// epsilon_k = (1/4)(1 - 2^(-k/2^k)), the historical choice.
inline std::vector<double> aurouet_epsilons(int count) {
    std::vector<double> eps(count);
    for (int k = 0; k < count; ++k)
        eps[k] = 0.25 * (1.0 - std::pow(2.0, -static_cast<double>(k) / std::pow(2.0, k)));
    return eps;
}

/// Strictly decreasing widths with r_k > 1/2: r_k = 1/2 + 2^(-k-1).
inline std::vector<double> default_widths(int count) {
    std::vector<double> r(count);
    for (int k = 0; k < count; ++k) r[k] = 0.5 + std::pow(2.0, -(k + 1));
    return r;
}

/// The finite data of the arithmetic assumption: g, (m_k), (eps_k), (r_k)
/// through a working horizon.
struct BrjunoSchedule {
    GFunction g;
    std::vector<long long> m;
    std::vector<double> eps;
    std::vector<double> r;

    int horizon() const {
        return static_cast<int>(std::min(std::min(m.size(), eps.size()), r.size()));
    }
    double g_at(int k) const { return g(m.at(k)); }
};

struct BrjunoSum {
    double partial = 0.0;   // sum_{k=1..K} ln g(m_k) / m_k
    double last_term = 0.0; // convergence indicator
    int terms = 0;
    bool g_below_one = false; // some ln g(m_k) < 0 in range
};

/// Partial Brjuno sum over k = 1..K_terms; g values must be positive.
inline BrjunoSum brjuno_sum(const GFunction& g, const std::vector<long long>& m, int K_terms) {
    if (K_terms < 1) throw validation_error("brjuno_sum needs K_terms >= 1");
    if (static_cast<int>(m.size()) < K_terms + 1)
        throw validation_error("brjuno_sum: m schedule shorter than K_terms + 1");
    BrjunoSum out;
    for (int k = 1; k <= K_terms; ++k) {
        const double gv = g(m[k]);
        if (!(gv > 0.0)) throw math_error("brjuno_sum: g(m_k) <= 0 at k = " + std::to_string(k));
        if (gv < 1.0) out.g_below_one = true;
        out.last_term = std::log(gv) / static_cast<double>(m[k]);
        out.partial += out.last_term;
        out.terms = k;
    }
    return out;
}

inline BrjunoSum brjuno_sum(const BrjunoSchedule& sched, int K_terms) {
    return brjuno_sum(sched.g, sched.m, K_terms);
}

/// Per-item verdict of the arithmetic assumption check.
struct AssumptionItem {
    bool checked = false;
    bool pass = false;
    std::string detail;
};

struct AssumptionReport {
    AssumptionItem item[7]; // items 1..7 at indices 0..6
    int k_checked = 0;
    int maxP = 0;
};

/// Finite verification of the seven assumption items. Items 4 and 5 are
/// enumerated over |P| <= maxP (and |Q| <= m_k) for each k and need the
/// frequencies; pass qd = nullptr to skip them. Failures are report
/// entries, not errors.
template <class C>
AssumptionReport check_assumption(const QuasilinearData<C>* qd, const BrjunoSchedule& sched,
                                  int k_max, int maxP) {
    AssumptionReport rep;
    const int horizon = sched.horizon();
    const int K = std::min(k_max, horizon - 1);
    if (K < 0) throw validation_error("check_assumption: empty schedule");
    rep.k_checked = K;
    rep.maxP = maxP;

    // item 1: m_0 = 1, m increasing, m_{k+1} <= 2 m_k + 1
    {
        auto& it = rep.item[0];
        it.checked = true;
        it.pass = sched.m.at(0) == 1;
        if (!it.pass) it.detail = "m_0 != 1";
        for (int k = 0; it.pass && k + 1 <= K; ++k) {
            if (sched.m[k + 1] <= sched.m[k] || sched.m[k + 1] > 2 * sched.m[k] + 1) {
                it.pass = false;
                it.detail = "violated between k = " + std::to_string(k) + " and k+1";
            }
        }
    }
    // item 2: partial Brjuno sum (finiteness is not finitely decidable)
    {
        auto& it = rep.item[1];
        it.checked = true;
        if (K >= 1) {
            const BrjunoSum B = brjuno_sum(sched.g, sched.m, K);
            it.pass = !B.g_below_one;
            it.detail = "partial B = " + format_double(B.partial) +
                        ", last term = " + format_double(B.last_term);
        } else {
            it.pass = true;
            it.detail = "no terms in range";
        }
    }
    // item 3: (n+2) g(m_k) ln g(m_k) >= m_k
    {
        auto& it = rep.item[2];
        it.checked = qd != nullptr;
        it.pass = true;
        if (qd) {
            const int n = qd->dims().n;
            for (int k = 0; k <= K; ++k) {
                const double gv = sched.g_at(k);
                if (!(gv > 0.0) || (n + 2) * gv * std::log(gv) < static_cast<double>(sched.m[k])) {
                    it.pass = false;
                    it.detail = "fails at k = " + std::to_string(k) + " (g = " + format_double(gv) + ")";
                    break;
                }
            }
        }
    }
    // items 4 and 5: divisor growth over the declared boxes
    if (qd) {
        auto& hi = rep.item[3];
        auto& lo = rep.item[4];
        hi.checked = lo.checked = true;
        hi.pass = lo.pass = true;
        const Dims dims = qd->dims();
        for (int k = 0; k <= K && (hi.pass || lo.pass); ++k) {
            const long long mk = sched.m[k];
            const double gv = sched.g_at(k);
            const double ek = sched.eps.at(k);
            detail::for_each_fourier(dims.d, maxP, [&](const std::vector<int>& P) {
                detail::for_each_taylor(dims.n, static_cast<int>(std::min<long long>(mk, 1000)),
                                        [&](const std::vector<int>& Q) {
                    const MultiIndex idx(P, Q);
                    const C value = divisor(idx, *qd);
                    if (divisor_vanishes(value)) return;
                    const double inv = 1.0 / scalar_traits<C>::abs(value);
                    const int pn = idx.p_norm();
                    if (pn > mk && hi.pass && inv > std::exp(ek * pn)) {
                        hi.pass = false;
                        hi.detail = "fails at k = " + std::to_string(k) + ", " + index_str(idx);
                    }
                    if (pn <= mk && lo.pass && inv > gv) {
                        lo.pass = false;
                        lo.detail = "fails at k = " + std::to_string(k) + ", " + index_str(idx);
                    }
                });
            });
        }
        if (hi.pass) hi.detail = "checked |P| <= " + std::to_string(maxP);
        if (lo.pass) lo.detail = "checked |P| <= " + std::to_string(maxP);
    }
    // item 6: 4^{4d+6} (r_k - r_{k+1} - eps_k)^{-4d-6} <= g(m_k)
    {
        auto& it = rep.item[5];
        it.checked = qd != nullptr;
        it.pass = true;
        if (qd) {
            const int d = qd->dims().d;
            const double expn = 4.0 * d + 6.0;
            for (int k = 0; k + 1 <= K; ++k) {
                const double gap = sched.r.at(k) - sched.r.at(k + 1) - sched.eps.at(k);
                if (!(gap > 0.0) || std::pow(4.0, expn) * std::pow(gap, -expn) > sched.g_at(k)) {
                    it.pass = false;
                    it.detail = "fails at k = " + std::to_string(k);
                    break;
                }
            }
        }
    }
    // item 7: r_k > 1/2
    {
        auto& it = rep.item[6];
        it.checked = true;
        it.pass = true;
        for (int k = 0; k <= K; ++k) {
            if (!(sched.r.at(k) > 0.5)) {
                it.pass = false;
                it.detail = "r_" + std::to_string(k) + " = " + format_double(sched.r[k]);
                break;
            }
        }
    }
    return rep;
}

/// Derived parameter sequences for the iteration:
/// delta_{k+1} = delta_k g(m_k)^(-(17+10n)/m_k),
/// zeta_{k+1} = (2 C''_S / g(m_k)) zeta_k, eta_k = sum_{j<=k} zeta_j.
struct IterationParams {
    std::vector<double> delta;
    std::vector<double> zeta;
    std::vector<double> eta;
    double c_s2 = 1.0;  // C''_S
    double D2 = 0.0;    // D'' = 10 + 6n
    double c_omega = 0.0;
    double B_partial = 0.0;
    double zeta0_bound = 0.0; // right side of the smallness condition on zeta_0
    bool zeta0_ok = false;
    bool eta_le_eighth = false;
    bool zeta_decreasing = false;
};

template <class C>
IterationParams build_params(const QuasilinearData<C>& qd, const BrjunoSchedule& sched,
                             double delta0, double zeta0, double c_s2) {
    const int n = qd.dims().n;
    const int d = qd.dims().d;
    const double c_omega = qd.c_omega();
    if (!(delta0 > 0.0) || delta0 > std::min(1.0, c_omega) + 1e-15)
        throw validation_error("build_params requires 0 < delta0 <= min(1, C_omega)");
    if (zeta0 < 0.0) throw validation_error("build_params requires zeta0 >= 0");
    const int horizon = sched.horizon();
    if (horizon < 1) throw validation_error("build_params: empty schedule");

    IterationParams out;
    out.c_s2 = c_s2;
    out.D2 = 10.0 + 6.0 * n;
    out.c_omega = c_omega;
    out.delta.resize(horizon);
    out.zeta.resize(horizon);
    out.eta.resize(horizon);
    out.delta[0] = delta0;
    out.zeta[0] = zeta0;
    out.eta[0] = zeta0;
    out.zeta_decreasing = true;
    const double exponent = 17.0 + 10.0 * n;
    for (int k = 0; k + 1 < horizon; ++k) {
        const double gv = sched.g_at(k);
        if (!(gv > 0.0)) throw math_error("build_params: g(m_k) <= 0");
        out.delta[k + 1] = out.delta[k] * std::pow(gv, -exponent / static_cast<double>(sched.m[k]));
        const double factor = 2.0 * c_s2 / gv;
        if (factor >= 1.0) out.zeta_decreasing = false;
        out.zeta[k + 1] = factor * out.zeta[k];
        out.eta[k + 1] = out.eta[k] + out.zeta[k + 1];
    }
    if (horizon >= 2) out.B_partial = brjuno_sum(sched.g, sched.m, horizon - 1).partial;
    const double delta_inf = out.delta.back(); // horizon stand-in for the limit
    out.zeta0_bound = delta_inf / (8.0 * (n + d) * (1.0 + 2.0 * c_s2 * (n + 2) * out.B_partial));
    out.zeta0_ok = zeta0 < out.zeta0_bound;
    out.eta_le_eighth = true;
    for (double e : out.eta)
        if (e > 0.125) out.eta_le_eighth = false;
    return out;
}

} // namespace tnf
