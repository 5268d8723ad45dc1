#pragma once

// Seeded random generators for series, fields and frequency data, plus the
// independent oracles (naive convolution, naive bracket) the tests check
// the library against.

#include <random>
#include <vector>

#include "tnf/quasilinear.hpp"
#include "tnf/series.hpp"
#include "tnf/vector_field.hpp"

namespace tnf::testing {

using Exact = GaussianRational;
using Approx = std::complex<double>;

inline std::mt19937& rng() {
    static std::mt19937 gen(0x5eed1234);
    return gen;
}

inline int rand_int(int lo, int hi) {
    std::uniform_int_distribution<int> dist(lo, hi);
    return dist(rng());
}

template <class C>
C rand_coeff(int denom_max = 4) {
    const long long num_re = rand_int(-6, 6);
    const long long num_im = rand_int(-6, 6);
    const long long den = rand_int(1, denom_max);
    using T = scalar_traits<C>;
    C v = T::from_ratio(num_re, den) + T::imaginary_unit() * T::from_ratio(num_im, den);
    if (T::is_zero(v)) v = T::one();
    return v;
}

inline MultiIndex rand_index(Dims dims, int maxP, int maxQ) {
    std::vector<int> P(dims.d), Q(dims.n);
    for (int j = 0; j < dims.d; ++j) P[j] = rand_int(-maxP, maxP);
    int budget = rand_int(0, maxQ);
    for (int j = 0; j < dims.n; ++j) {
        Q[j] = rand_int(0, budget);
        budget -= Q[j];
    }
    return {P, Q};
}

template <class C>
Series<C> rand_series(Dims dims, int cap, int terms, int maxP = 3, int min_order = 0) {
    Series<C> f(dims, cap);
    for (int t = 0; t < terms; ++t) {
        MultiIndex idx = rand_index(dims, maxP, cap);
        if (idx.q_norm() < min_order) continue;
        f.add_term(idx, rand_coeff<C>());
    }
    return f;
}

/// Random field whose torus components have order >= 1 and disk components
/// order >= 2 (an admissible perturbation).
template <class C>
VectorField<C> rand_perturbation(Dims dims, int cap, int terms, int maxP = 3) {
    VectorField<C> F(dims, cap);
    for (int t = 0; t < terms; ++t) {
        const int L = rand_int(0, dims.d + dims.n - 1);
        const bool torus = L < dims.d;
        const int comp_cap = torus ? cap : cap + 1;
        const int min_q = torus ? 1 : 2;
        for (int attempt = 0; attempt < 40; ++attempt) {
            MultiIndex idx = rand_index(dims, maxP, comp_cap);
            if (idx.q_norm() >= min_q) {
                F.add_term(L, idx, rand_coeff<C>());
                break;
            }
        }
    }
    return F;
}

/// Naive Cauchy product over raw term vectors; the convolution oracle.
template <class C>
Series<C> naive_mul(const Series<C>& a, const Series<C>& b, int cap) {
    std::vector<std::pair<MultiIndex, C>> ta(a.terms().begin(), a.terms().end());
    std::vector<std::pair<MultiIndex, C>> tb(b.terms().begin(), b.terms().end());
    Series<C> out(a.dims(), cap);
    for (const auto& [ia, ca] : ta) {
        for (const auto& [ib, cb] : tb) {
            MultiIndex sum = ia;
            for (std::size_t j = 0; j < sum.P.size(); ++j) sum.P[j] += ib.P[j];
            for (std::size_t j = 0; j < sum.Q.size(); ++j) sum.Q[j] += ib.Q[j];
            if (sum.q_norm() <= cap) out.add_term(sum, ca * cb);
        }
    }
    return out;
}

/// Independent bracket oracle [F,G] = DG.F - DF.G written against raw term
/// maps with its own little derivative helper.
template <class C>
VectorField<C> naive_bracket(const VectorField<C>& F, const VectorField<C>& G) {
    using T = scalar_traits<C>;
    const Dims dims = F.dims();
    auto naive_deriv = [&](const Series<C>& s, bool torus_var, int j) {
        Series<C> out(dims, s.cap());
        for (const auto& [idx, c] : s.terms()) {
            if (torus_var) {
                if (idx.P[j] == 0) continue;
                out.add_term(idx, c * T::imaginary_unit() * T::from_int(idx.P[j]));
            } else {
                if (idx.Q[j] == 0) continue;
                MultiIndex down = idx;
                down.Q[j] -= 1;
                out.add_term(down, c * T::from_int(idx.Q[j]));
            }
        }
        return out;
    };
    auto apply_jacobian = [&](const VectorField<C>& A, const VectorField<C>& W) {
        VectorField<C> out(dims, A.cap());
        for (int L = 0; L < A.component_count(); ++L) {
            Series<C> acc(dims, A.component_cap(L));
            for (int v = 0; v < dims.d + dims.n; ++v) {
                const bool torus_var = v < dims.d;
                Series<C> da = naive_deriv(A.component(L), torus_var, torus_var ? v : v - dims.d);
                acc = add(acc, naive_mul(da, W.component(v), A.component_cap(L)));
            }
            out.set_component(L, acc);
        }
        return out;
    };
    return sub(apply_jacobian(G, F), apply_jacobian(F, G));
}

inline QuasilinearData<Exact> qd_exact(std::vector<long> omega_num,
                                       std::vector<std::pair<long, long>> lambda_parts) {
    std::vector<Exact> w, l;
    for (long v : omega_num) w.push_back(scalar_traits<Exact>::from_int(v));
    for (auto [re, im] : lambda_parts)
        l.push_back(scalar_traits<Exact>::from_int(re) +
                    scalar_traits<Exact>::imaginary_unit() * scalar_traits<Exact>::from_int(im));
    return {std::move(w), std::move(l)};
}

} // namespace tnf::testing
