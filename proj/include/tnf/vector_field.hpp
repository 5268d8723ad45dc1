#pragma once

#include <vector>

#include "tnf/quasilinear.hpp"
#include "tnf/series.hpp"

namespace tnf {

/// Vector field on T^d x C^n with the shifted truncation convention: a
/// field of cap K stores its d torus components through |Q| <= K and its
/// n disk components through |Q| <= K+1, so the degree-k slice pairs
/// |Q| = k torus terms with |Q| = k+1 disk terms.
template <class C>
class VectorField {
public:
    VectorField(Dims dims, int cap) : dims_(dims), cap_(cap) {
        if (cap < 0) throw validation_error("vector field cap must be non-negative");
        components_.reserve(dims.d + dims.n);
        for (int L = 0; L < dims.d + dims.n; ++L)
            components_.emplace_back(dims, component_cap(L));
    }

    static VectorField zero(Dims dims, int cap) { return VectorField(dims, cap); }

    const Dims& dims() const { return dims_; }
    int cap() const { return cap_; }
    int component_count() const { return dims_.d + dims_.n; }
    int component_cap(int L) const { return L < dims_.d ? cap_ : cap_ + 1; }
    bool is_torus_component(int L) const { return L < dims_.d; }

    const Series<C>& component(int L) const { return components_.at(L); }

    void set_component(int L, Series<C> s) {
        if (!(s.dims() == dims_)) throw validation_error("component dimension mismatch");
        if (s.cap() != component_cap(L)) throw validation_error("component cap mismatch");
        components_.at(L) = std::move(s);
    }

    void add_term(int L, const MultiIndex& idx, const C& value) {
        components_.at(L).add_term(idx, value);
    }

    bool is_zero() const {
        for (const auto& s : components_)
            if (!s.is_zero()) return false;
        return true;
    }

    friend bool operator==(const VectorField& a, const VectorField& b) {
        return a.dims_ == b.dims_ && a.cap_ == b.cap_ && a.components_ == b.components_;
    }

private:
    Dims dims_;
    int cap_;
    std::vector<Series<C>> components_;
};

namespace detail {
template <class C>
void require_compatible(const VectorField<C>& a, const VectorField<C>& b) {
    if (!(a.dims() == b.dims())) throw validation_error("vector field dimension mismatch");
    if (a.cap() != b.cap()) throw validation_error("vector field cap mismatch");
}

/// Projection |Q| <= k at unchanged storage cap.
template <class C>
Series<C> project_q(const Series<C>& f, int k) {
    if (k >= f.cap()) return f;
    Series<C> result(f.dims(), f.cap());
    for (const auto& [idx, c] : f.terms())
        if (idx.q_norm() <= k) result.add_term(idx, c);
    return result;
}
} // namespace detail

template <class C>
VectorField<C> add(const VectorField<C>& a, const VectorField<C>& b) {
    detail::require_compatible(a, b);
    VectorField<C> out(a.dims(), a.cap());
    for (int L = 0; L < a.component_count(); ++L)
        out.set_component(L, add(a.component(L), b.component(L)));
    return out;
}

template <class C>
VectorField<C> sub(const VectorField<C>& a, const VectorField<C>& b) {
    detail::require_compatible(a, b);
    VectorField<C> out(a.dims(), a.cap());
    for (int L = 0; L < a.component_count(); ++L)
        out.set_component(L, sub(a.component(L), b.component(L)));
    return out;
}

template <class C>
VectorField<C> scale(const VectorField<C>& a, const C& s) {
    VectorField<C> out(a.dims(), a.cap());
    for (int L = 0; L < a.component_count(); ++L)
        out.set_component(L, scale(a.component(L), s));
    return out;
}

template <class C>
VectorField<C> operator+(const VectorField<C>& a, const VectorField<C>& b) { return add(a, b); }
template <class C>
VectorField<C> operator-(const VectorField<C>& a, const VectorField<C>& b) { return sub(a, b); }

/// The quasilinear field S = sum omega_j d/dX_j + sum lambda_j Y_j d/dY_j.
template <class C>
VectorField<C> make_S(const QuasilinearData<C>& qd, int cap) {
    const Dims dims = qd.dims();
    VectorField<C> S(dims, cap);
    const MultiIndex origin(std::vector<int>(dims.d, 0), std::vector<int>(dims.n, 0));
    for (int j = 0; j < dims.d; ++j) S.add_term(j, origin, qd.omega[j]);
    for (int j = 0; j < dims.n; ++j) {
        MultiIndex idx = origin;
        idx.Q[j] = 1;
        S.add_term(dims.d + j, idx, qd.lambda[j]);
    }
    return S;
}

/// T^k of a vector field: torus components truncated at k, disk components
/// at k+1. Storage caps are unchanged (the result is the degree-k object
/// embedded at the same cap).
template <class C>
VectorField<C> vf_truncate(const VectorField<C>& F, int k) {
    if (k < 0 || k > F.cap()) throw validation_error("vector field truncation order out of range");
    VectorField<C> out(F.dims(), F.cap());
    for (int L = 0; L < F.component_count(); ++L)
        out.set_component(L, detail::project_q(F.component(L), F.is_torus_component(L) ? k : k + 1));
    return out;
}

/// The quasilinear part is T^0 F.
template <class C>
VectorField<C> quasilinear_part(const VectorField<C>& F) {
    return vf_truncate(F, 0);
}

/// Quasi-order: largest k such that every torus component has order k and
/// every disk component order k+1; cap+1 for the zero field.
template <class C>
int vf_order(const VectorField<C>& F) {
    int result = F.cap() + 1;
    for (int L = 0; L < F.component_count(); ++L) {
        const Series<C>& s = F.component(L);
        if (s.is_zero()) continue;
        const int k = F.is_torus_component(L) ? order_of(s) : order_of(s) - 1;
        result = std::min(result, k);
    }
    return result;
}

/// Quasi-order over the coefficients the backend can distinguish from
/// zero: same as vf_order on the exact backend; on the floating backend,
/// terms within tau_cmp of zero (arithmetic residue) do not count.
template <class C>
int vf_order_effective(const VectorField<C>& F) {
    int result = F.cap() + 1;
    for (int L = 0; L < F.component_count(); ++L) {
        const int shift = F.is_torus_component(L) ? 0 : 1;
        for (const auto& [idx, c] : F.component(L).terms()) {
            if (scalar_traits<C>::negligible(c)) continue;
            result = std::min(result, idx.q_norm() - shift);
        }
    }
    return result;
}

/// Max over the component weighted norms.
template <class C>
double vf_norm(const VectorField<C>& F, const NormParams& p) {
    double m = 0.0;
    for (int L = 0; L < F.component_count(); ++L)
        m = std::max(m, weighted_norm(F.component(L), p));
    return m;
}

/// Degree-k quasi-homogeneous slice: |Q| = k torus terms, |Q| = k+1 disk
/// terms, at unchanged storage caps.
template <class C>
VectorField<C> vf_degree_slice(const VectorField<C>& F, int k) {
    VectorField<C> out(F.dims(), F.cap());
    for (int L = 0; L < F.component_count(); ++L)
        out.set_component(L, degree_slice(F.component(L), F.is_torus_component(L) ? k : k + 1));
    return out;
}

/// Componentwise product h * F of a scalar series with a field.
template <class C>
VectorField<C> scalar_times_field(const Series<C>& h, const VectorField<C>& F) {
    if (!(h.dims() == F.dims())) throw validation_error("scalar/field dimension mismatch");
    VectorField<C> out(F.dims(), F.cap());
    for (int L = 0; L < F.component_count(); ++L)
        out.set_component(L, mul_to_cap(h, F.component(L), F.component_cap(L)));
    return out;
}

/// DA . W (the Jacobian of A applied to W), componentwise
/// sum_m dX_m(A_L) W_m + sum_j dY_j(A_L) W_{d+j}, truncated to A's caps.
template <class C>
VectorField<C> jacobian_apply(const VectorField<C>& A, const VectorField<C>& W) {
    detail::require_compatible(A, W);
    const Dims dims = A.dims();
    VectorField<C> out(dims, A.cap());
    for (int L = 0; L < A.component_count(); ++L) {
        const int out_cap = A.component_cap(L);
        Series<C> acc(dims, out_cap);
        for (int m = 0; m < dims.d; ++m) {
            Series<C> da = dx(A.component(L), m);
            if (da.is_zero()) continue;
            acc = add(acc, mul_to_cap(da, W.component(m), out_cap));
        }
        for (int j = 0; j < dims.n; ++j) {
            Series<C> da = dy(A.component(L), j);
            if (da.is_zero()) continue;
            acc = add(acc, mul_to_cap(da, W.component(dims.d + j), out_cap));
        }
        out.set_component(L, acc);
    }
    return out;
}

/// Lie bracket [F,G] = DG.F - DF.G; with this orientation ad_S := [S, .]
/// acts diagonally on monomial fields with eigenvalue i<P,omega> + <Q,Lambda>.
template <class C>
VectorField<C> lie_bracket(const VectorField<C>& F, const VectorField<C>& G) {
    return sub(jacobian_apply(G, F), jacobian_apply(F, G));
}

/// Lie derivative F(g) = sum_j F_j dX_j(g) + sum_j' F_{d+j'} dY_j'(g).
template <class C>
Series<C> lie_derivative(const VectorField<C>& F, const Series<C>& g) {
    if (!(F.dims() == g.dims())) throw validation_error("field/function dimension mismatch");
    const Dims dims = F.dims();
    Series<C> acc(dims, g.cap());
    for (int m = 0; m < dims.d; ++m) {
        Series<C> dg = dx(g, m);
        if (dg.is_zero()) continue;
        acc = add(acc, mul_to_cap(F.component(m), dg, g.cap()));
    }
    for (int j = 0; j < dims.n; ++j) {
        Series<C> dg = dy(g, j);
        if (dg.is_zero()) continue;
        acc = add(acc, mul_to_cap(F.component(dims.d + j), dg, g.cap()));
    }
    return acc;
}

/// Near-identity change of variables Phi = Id + displacement. The
/// displacement is stored like a vector field (same shifted caps); the
/// torus displacements live in the universal cover, so compositions are
/// Taylor expansions in the displacement, never angle wrapping.
template <class C>
class Diffeo {
public:
    explicit Diffeo(VectorField<C> displacement) : disp_(std::move(displacement)) {}

    static Diffeo identity(Dims dims, int cap) { return Diffeo(VectorField<C>::zero(dims, cap)); }

    const VectorField<C>& displacement() const { return disp_; }
    const Dims& dims() const { return disp_.dims(); }
    int cap() const { return disp_.cap(); }

    /// Torus displacements of order >= 1 and disk displacements of
    /// order >= 2.
    bool tangent_to_identity() const {
        for (int L = 0; L < disp_.component_count(); ++L) {
            const int need = disp_.is_torus_component(L) ? 1 : 2;
            if (order_of(disp_.component(L)) < need) return false;
        }
        return true;
    }

    /// T^k Phi, i.e. identity plus the vf-truncated displacement.
    Diffeo truncated(int k) const { return Diffeo(vf_truncate(disp_, k)); }

private:
    VectorField<C> disp_;
};

namespace detail {

/// sum over multi-exponents I of (1/I!) d_I(f) * bar^I, truncated to
/// out_cap. Recursion over the d+n variables with the running derivative,
/// the running power product and the running 1/I! factor; branches are cut
/// once the power product's order passes the cap (each displacement factor
/// raises the order, so the sum is finite).
template <class C>
void taylor_compose_rec(const Series<C>& df, const Series<C>& prod, const C& factor, int v,
                        const VectorField<C>& bar, int out_cap, Series<C>& result) {
    using Traits = scalar_traits<C>;
    const int nvars = bar.component_count();
    if (v == nvars) {
        result = add(result, scale(mul_to_cap(df, prod, out_cap), factor));
        return;
    }
    Series<C> cur = df;
    Series<C> p = prod;
    C f = factor;
    for (int e = 0;; ++e) {
        if (e > 0) {
            cur = (v < bar.dims().d) ? dx(cur, v) : dy(cur, v - bar.dims().d);
            if (cur.is_zero()) break;
            p = mul_to_cap(p, bar.component(v), out_cap);
            if (p.is_zero() || order_of(p) > out_cap) break;
            f = f * Traits::from_ratio(1, e);
        }
        taylor_compose_rec(cur, p, f, v + 1, bar, out_cap, result);
    }
}

template <class C>
Series<C> taylor_compose(const Series<C>& f, const VectorField<C>& bar, int out_cap) {
    Series<C> result(f.dims(), out_cap);
    Series<C> one = Series<C>::constant(f.dims(), out_cap, scalar_traits<C>::one());
    taylor_compose_rec(f, one, scalar_traits<C>::one(), 0, bar, out_cap, result);
    return result;
}

} // namespace detail

/// T^cap(R o Phi) for Phi tangent to identity, computed by the multivariate
/// Taylor sum over the displacement.
template <class C>
VectorField<C> compose_with_diffeo(const VectorField<C>& R, const Diffeo<C>& phi) {
    detail::require_compatible(R, phi.displacement());
    if (!phi.tangent_to_identity())
        throw math_error("composition requires a diffeomorphism tangent to identity");
    VectorField<C> out(R.dims(), R.cap());
    for (int L = 0; L < R.component_count(); ++L)
        out.set_component(L, detail::taylor_compose(R.component(L), phi.displacement(), R.component_cap(L)));
    return out;
}

/// Scalar variant of the composition, g o Phi at the cap of g.
template <class C>
Series<C> compose_with_diffeo(const Series<C>& g, const Diffeo<C>& phi) {
    if (!phi.tangent_to_identity())
        throw math_error("composition requires a diffeomorphism tangent to identity");
    return detail::taylor_compose(g, phi.displacement(), g.cap());
}

/// Norm of the order-k conjugacy defect T^k(D T^kPhi . G) - T^k(F o T^kPhi);
/// zero means Phi conjugates G to F through order k.
template <class C>
double pushforward_residual(const VectorField<C>& F, const Diffeo<C>& phi, const VectorField<C>& G,
                            int k, const NormParams& p) {
    detail::require_compatible(F, G);
    if (k < 0 || k > F.cap()) throw validation_error("residual order out of range");
    const Diffeo<C> phik = phi.truncated(k);
    VectorField<C> lhs = add(G, jacobian_apply(phik.displacement(), G));
    VectorField<C> rhs = compose_with_diffeo(F, phik);
    return vf_norm(vf_truncate(sub(lhs, rhs), k), p);
}

} // namespace tnf
