#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "tnf/quasilinear.hpp"
#include "tnf/vector_field.hpp"

namespace tnf {

namespace detail {

/// Visits every P in Z^d with |P| <= maxP.
inline void for_each_fourier(int d, int maxP, const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> P(d, 0);
    std::function<void(int, int)> rec = [&](int pos, int budget) {
        if (pos == d) {
            visit(P);
            return;
        }
        for (int v = -budget; v <= budget; ++v) {
            P[pos] = v;
            rec(pos + 1, budget - std::abs(v));
        }
    };
    rec(0, maxP);
}

/// Visits every Q in N^n with |Q| <= maxQ.
inline void for_each_taylor(int n, int maxQ, const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> Q(n, 0);
    std::function<void(int, int)> rec = [&](int pos, int budget) {
        if (pos == n) {
            visit(Q);
            return;
        }
        for (int v = 0; v <= budget; ++v) {
            Q[pos] = v;
            rec(pos + 1, budget - v);
        }
    };
    rec(0, maxQ);
}

} // namespace detail

/// Equivalence classes of the divisor relation over the box
/// |P| <= maxP, |Q| <= maxQ: indices grouped by exact divisor value on the
/// exact backend, by tau_res clustering on the floating one.
template <class C>
struct ResonanceClassification {
    struct Class {
        C value;
        std::vector<MultiIndex> members;
        int min_p_norm = 0; // smallest |P| among members
        bool zero_class = false;
    };

    std::vector<Class> classes; // ordered by value for deterministic reports
    int maxP = 0;
    int maxQ = 0;

    std::size_t total_members() const {
        std::size_t t = 0;
        for (const auto& c : classes) t += c.members.size();
        return t;
    }

    const Class* find(const C& value) const {
        for (const auto& c : classes) {
            if constexpr (scalar_traits<C>::exact) {
                if (c.value == value) return &c;
            } else {
                if (scalar_traits<C>::abs(c.value - value) <= float_config::resonance_tol()) return &c;
            }
        }
        return nullptr;
    }

    /// Low/high frequency split for a given m_k: a nonzero class is low
    /// frequency iff some member has |P| <= m_k; the zero class enters
    /// neither side.
    std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split(int m_k) const {
        std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
        for (std::size_t i = 0; i < classes.size(); ++i) {
            if (classes[i].zero_class) continue;
            (classes[i].min_p_norm <= m_k ? out.first : out.second).push_back(i);
        }
        return out;
    }
};

template <class C>
ResonanceClassification<C> enumerate_classes(const QuasilinearData<C>& qd, int maxP, int maxQ) {
    if (maxP < 0 || maxQ < 0) throw validation_error("enumeration caps must be non-negative");
    const Dims dims = qd.dims();

    std::vector<std::pair<C, MultiIndex>> items;
    detail::for_each_fourier(dims.d, maxP, [&](const std::vector<int>& P) {
        detail::for_each_taylor(dims.n, maxQ, [&](const std::vector<int>& Q) {
            MultiIndex idx(P, Q);
            items.emplace_back(divisor(idx, qd), idx);
        });
    });
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (scalar_traits<C>::value_less(a.first, b.first)) return true;
        if (scalar_traits<C>::value_less(b.first, a.first)) return false;
        return IndexOrder{}(a.second, b.second);
    });

    ResonanceClassification<C> out;
    out.maxP = maxP;
    out.maxQ = maxQ;
    for (auto& [value, idx] : items) {
        bool fresh = out.classes.empty();
        if (!fresh) {
            const C& rep = out.classes.back().value;
            if constexpr (scalar_traits<C>::exact) {
                fresh = !(rep == value);
            } else {
                fresh = scalar_traits<C>::abs(rep - value) > float_config::resonance_tol();
            }
        }
        if (fresh) {
            typename ResonanceClassification<C>::Class cls;
            cls.value = value;
            cls.zero_class = divisor_vanishes(value);
            cls.min_p_norm = idx.p_norm();
            out.classes.push_back(std::move(cls));
        }
        auto& cls = out.classes.back();
        cls.min_p_norm = std::min(cls.min_p_norm, idx.p_norm());
        cls.members.push_back(std::move(idx));
    }
    return out;
}

/// Resonant / nonresonant split of a scalar series under the given shift.
template <class C>
std::pair<Series<C>, Series<C>> decompose_resonant(const Series<C>& f, const QuasilinearData<C>& qd,
                                                   DivisorShift shift = DivisorShift::none, int j = 0) {
    Series<C> res(f.dims(), f.cap());
    Series<C> nonres(f.dims(), f.cap());
    for (const auto& [idx, c] : f.terms())
        (is_resonant(idx, qd, shift, j) ? res : nonres).add_term(idx, c);
    return {res, nonres};
}

/// Resonant / nonresonant split of a vector field; disk components use the
/// lambda_j-shifted divisor.
template <class C>
std::pair<VectorField<C>, VectorField<C>> decompose_resonant(const VectorField<C>& F,
                                                             const QuasilinearData<C>& qd) {
    VectorField<C> res(F.dims(), F.cap());
    VectorField<C> nonres(F.dims(), F.cap());
    for (int L = 0; L < F.component_count(); ++L) {
        for (const auto& [idx, c] : F.component(L).terms()) {
            if (divisor_vanishes(component_divisor(idx, qd, L)))
                res.add_term(L, idx, c);
            else
                nonres.add_term(L, idx, c);
        }
    }
    return {res, nonres};
}

template <class C>
bool is_resonant_field(const VectorField<C>& F, const QuasilinearData<C>& qd) {
    auto [res, nonres] = decompose_resonant(F, qd);
    return nonres.is_zero();
}

template <class C>
bool is_nonresonant_field(const VectorField<C>& F, const QuasilinearData<C>& qd) {
    auto [res, nonres] = decompose_resonant(F, qd);
    return res.is_zero();
}

/// max |divisor|^-1 over the nonresonant indices of the box
/// |P| <= m, |Q| <= m.
template <class C>
double g_of_m(const QuasilinearData<C>& qd, int m) {
    if (m < 1) throw validation_error("g_of_m requires m >= 1");
    const Dims dims = qd.dims();
    double best = -1.0;
    detail::for_each_fourier(dims.d, m, [&](const std::vector<int>& P) {
        detail::for_each_taylor(dims.n, m, [&](const std::vector<int>& Q) {
            const C value = divisor(MultiIndex(P, Q), qd);
            if (divisor_vanishes(value)) return;
            best = std::max(best, 1.0 / scalar_traits<C>::abs(value));
        });
    });
    if (best < 0.0) throw math_error("g_of_m: no nonresonant index in the box");
    return best;
}

/// Divisor values reachable with |P| <= m_k and |Q| <= maxQ; the low
/// frequency membership test for split_frequencies.
template <class C>
std::vector<C> low_frequency_divisors(const QuasilinearData<C>& qd, int m_k, int maxQ) {
    const Dims dims = qd.dims();
    std::vector<C> values;
    detail::for_each_fourier(dims.d, m_k, [&](const std::vector<int>& P) {
        detail::for_each_taylor(dims.n, maxQ, [&](const std::vector<int>& Q) {
            values.push_back(divisor(MultiIndex(P, Q), qd));
        });
    });
    std::sort(values.begin(), values.end(), scalar_traits<C>::value_less);
    values.erase(std::unique(values.begin(), values.end(),
                             [](const C& a, const C& b) {
                                 return !scalar_traits<C>::value_less(a, b) &&
                                        !scalar_traits<C>::value_less(b, a);
                             }),
                 values.end());
    return values;
}

/// Splits a nonresonant field into the part supported on classes that
/// contain a couple with |P| <= m_k (within |Q| <= maxQ) and the rest.
/// A resonant input term is an error: the split applies to the
/// nonresonant right-hand side only.
template <class C>
std::pair<VectorField<C>, VectorField<C>> split_frequencies(const VectorField<C>& R,
                                                            const QuasilinearData<C>& qd, int m_k,
                                                            int maxQ) {
    if (m_k < 0) throw validation_error("split_frequencies requires m_k >= 0");
    const std::vector<C> low = low_frequency_divisors(qd, m_k, maxQ);
    auto is_low = [&](const C& value) {
        // sorted vector; exact binary search, tolerance scan for floats
        if constexpr (scalar_traits<C>::exact) {
            auto it = std::lower_bound(low.begin(), low.end(), value, scalar_traits<C>::value_less);
            return it != low.end() && *it == value;
        } else {
            for (const C& v : low)
                if (scalar_traits<C>::abs(v - value) <= float_config::resonance_tol()) return true;
            return false;
        }
    };

    VectorField<C> part0(R.dims(), R.cap());
    VectorField<C> partInf(R.dims(), R.cap());
    for (int L = 0; L < R.component_count(); ++L) {
        for (const auto& [idx, c] : R.component(L).terms()) {
            const C value = component_divisor(idx, qd, L);
            if (divisor_vanishes(value))
                throw math_error("split_frequencies: resonant term in the right-hand side at " +
                                 index_str(idx));
            (is_low(value) ? part0 : partInf).add_term(L, idx, c);
        }
    }
    return {part0, partInf};
}

} // namespace tnf
