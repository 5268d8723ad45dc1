#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <utility>

#include "tnf/errors.hpp"
#include "tnf/multi_index.hpp"
#include "tnf/scalar.hpp"

namespace tnf {

/// Weights of the analytic norm sum |f_{P,Q}| e^{r|P|} delta^{|Q|}:
/// r is the torus strip half-width, delta the disk radius.
struct NormParams {
    double r;
    double delta;
    NormParams(double r_, double delta_) : r(r_), delta(delta_) {
        if (!(r > 0.0) || !(delta > 0.0)) throw validation_error("NormParams require r > 0 and delta > 0");
    }
};

/// Sparse truncated Fourier-Taylor series: a finite map
/// (P,Q) -> coefficient with every stored |Q| <= cap and no stored zero
/// coefficient, so equality is structural. Immutable in spirit: all
/// operations return fresh values.
template <class C>
class Series {
public:
    using Traits = scalar_traits<C>;
    using TermMap = std::map<MultiIndex, C, IndexOrder>;

    Series(Dims dims, int cap) : dims_(dims), cap_(cap) {
        if (dims.d < 1 || dims.n < 1) throw validation_error("Series requires d >= 1 and n >= 1");
        if (cap < 0) throw validation_error("Series cap must be non-negative");
    }

    static Series zero(Dims dims, int cap) { return Series(dims, cap); }

    static Series constant(Dims dims, int cap, const C& value) {
        Series s(dims, cap);
        s.add_term(MultiIndex(std::vector<int>(dims.d, 0), std::vector<int>(dims.n, 0)), value);
        return s;
    }

    static Series monomial(Dims dims, int cap, const MultiIndex& idx, const C& value) {
        Series s(dims, cap);
        s.add_term(idx, value);
        return s;
    }

    const Dims& dims() const { return dims_; }
    int cap() const { return cap_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    C coeff(const MultiIndex& idx) const {
        auto it = terms_.find(idx);
        return it == terms_.end() ? Traits::zero() : it->second;
    }

    /// Accumulates value at idx, pruning exact zeros.
    void add_term(const MultiIndex& idx, const C& value) {
        check_index(idx, dims_);
        if (idx.q_norm() > cap_) throw validation_error("term exceeds series cap");
        if (Traits::is_zero(value)) return;
        auto [it, inserted] = terms_.try_emplace(idx, value);
        if (!inserted) {
            it->second += value;
            if (Traits::is_zero(it->second)) terms_.erase(it);
        }
    }

    friend bool operator==(const Series& a, const Series& b) {
        return a.dims_ == b.dims_ && a.cap_ == b.cap_ && a.terms_ == b.terms_;
    }

private:
    Dims dims_;
    int cap_;
    TermMap terms_;
};

namespace detail {
template <class C>
void require_same_dims(const Series<C>& a, const Series<C>& b) {
    if (!(a.dims() == b.dims())) throw validation_error("series dimension mismatch");
}
} // namespace detail

template <class C>
Series<C> add(const Series<C>& a, const Series<C>& b) {
    detail::require_same_dims(a, b);
    if (a.cap() != b.cap()) throw validation_error("series cap mismatch");
    Series<C> result(a.dims(), a.cap());
    for (const auto& [idx, c] : a.terms()) result.add_term(idx, c);
    for (const auto& [idx, c] : b.terms()) result.add_term(idx, c);
    return result;
}

template <class C>
Series<C> scale(const Series<C>& a, const C& s) {
    Series<C> result(a.dims(), a.cap());
    for (const auto& [idx, c] : a.terms()) result.add_term(idx, c * s);
    return result;
}

template <class C>
Series<C> negate(const Series<C>& a) {
    return scale(a, -scalar_traits<C>::one());
}

template <class C>
Series<C> sub(const Series<C>& a, const Series<C>& b) {
    return add(a, negate(b));
}

/// Cauchy product truncated to out_cap: P-indices add in Z^d, Q in N^n,
/// terms with |Q| > out_cap are dropped. Internal workhorse; the public
/// mul() enforces the equal-cap contract.
template <class C>
Series<C> mul_to_cap(const Series<C>& a, const Series<C>& b, int out_cap) {
    detail::require_same_dims(a, b);
    Series<C> result(a.dims(), out_cap);
    const int d = a.dims().d, n = a.dims().n;
    MultiIndex idx(std::vector<int>(d, 0), std::vector<int>(n, 0));
    for (const auto& [ia, ca] : a.terms()) {
        if (ia.q_norm() > out_cap) continue;
        for (const auto& [ib, cb] : b.terms()) {
            if (ia.q_norm() + ib.q_norm() > out_cap) continue;
            for (int j = 0; j < d; ++j) idx.P[j] = ia.P[j] + ib.P[j];
            for (int j = 0; j < n; ++j) idx.Q[j] = ia.Q[j] + ib.Q[j];
            result.add_term(idx, ca * cb);
        }
    }
    return result;
}

template <class C>
Series<C> mul(const Series<C>& a, const Series<C>& b) {
    if (a.cap() != b.cap()) throw validation_error("series cap mismatch");
    return mul_to_cap(a, b, a.cap());
}

template <class C>
Series<C> operator+(const Series<C>& a, const Series<C>& b) { return add(a, b); }
template <class C>
Series<C> operator-(const Series<C>& a, const Series<C>& b) { return sub(a, b); }
template <class C>
Series<C> operator*(const Series<C>& a, const Series<C>& b) { return mul(a, b); }
template <class C>
Series<C> operator-(const Series<C>& a) { return negate(a); }

/// Keeps exactly the terms with |Q| <= k; the Fourier index is
/// unrestricted. Idempotent.
template <class C>
Series<C> truncate(const Series<C>& f, int k) {
    if (k < 0 || k > f.cap()) throw validation_error("truncation order out of range");
    Series<C> result(f.dims(), k);
    for (const auto& [idx, c] : f.terms())
        if (idx.q_norm() <= k) result.add_term(idx, c);
    return result;
}

/// Relabels to a larger cap without adding terms. Only meaningful when
/// the caller knows the series is exactly a polynomial (no hidden tail),
/// which is the reading used throughout: a Series is the finite object.
template <class C>
Series<C> lift_cap(const Series<C>& f, int cap) {
    if (cap < f.cap()) throw validation_error("lift_cap cannot shrink a cap");
    Series<C> result(f.dims(), cap);
    for (const auto& [idx, c] : f.terms()) result.add_term(idx, c);
    return result;
}

template <class C>
Series<C> with_cap(const Series<C>& f, int cap) {
    return cap >= f.cap() ? lift_cap(f, cap) : truncate(f, cap);
}

/// Largest k with: |Q| <= k-1 implies a vanishing coefficient. For the
/// zero series returns cap+1 (sentinel for "order above cap").
template <class C>
int order_of(const Series<C>& f) {
    if (f.is_zero()) return f.cap() + 1;
    return f.terms().begin()->first.q_norm(); // map is ordered by |Q| first
}

/// Terms with |Q| == k exactly.
template <class C>
Series<C> degree_slice(const Series<C>& f, int k) {
    Series<C> result(f.dims(), f.cap());
    for (const auto& [idx, c] : f.terms())
        if (idx.q_norm() == k) result.add_term(idx, c);
    return result;
}

struct Variable {
    enum class Kind { X, Y };
    Kind kind;
    int index; // 0-based within its block
};

/// Partial derivative: d/dX_j multiplies each term by i P_j, d/dY_j maps
/// Y^Q to Q_j Y^(Q - E_j) (terms with Q_j = 0 vanish).
template <class C>
Series<C> derivative(const Series<C>& f, Variable var) {
    using Traits = scalar_traits<C>;
    const Dims dims = f.dims();
    if (var.index < 0 || var.index >= (var.kind == Variable::Kind::X ? dims.d : dims.n))
        throw validation_error("derivative variable index out of range");
    Series<C> result(dims, f.cap());
    if (var.kind == Variable::Kind::X) {
        const C iunit = Traits::imaginary_unit();
        for (const auto& [idx, c] : f.terms()) {
            const int pj = idx.P[var.index];
            if (pj == 0) continue;
            result.add_term(idx, c * iunit * Traits::from_int(pj));
        }
    } else {
        for (const auto& [idx, c] : f.terms()) {
            const int qj = idx.Q[var.index];
            if (qj == 0) continue;
            MultiIndex down = idx;
            down.Q[var.index] -= 1;
            result.add_term(down, c * Traits::from_int(qj));
        }
    }
    return result;
}

template <class C>
Series<C> dx(const Series<C>& f, int j) { return derivative(f, {Variable::Kind::X, j}); }
template <class C>
Series<C> dy(const Series<C>& f, int j) { return derivative(f, {Variable::Kind::Y, j}); }

/// Multiplies by the monomial Y_j, producing indices Q + E_j; out_cap must
/// accommodate the shifted degrees.
template <class C>
Series<C> shift_y(const Series<C>& f, int j, int out_cap) {
    Series<C> result(f.dims(), out_cap);
    for (const auto& [idx, c] : f.terms()) {
        if (idx.q_norm() + 1 > out_cap) continue;
        MultiIndex up = idx;
        up.Q[j] += 1;
        result.add_term(up, c);
    }
    return result;
}

/// Weighted analytic norm sum |f_{P,Q}| e^{r|P|} delta^{|Q|}; evaluated in
/// double on both backends.
template <class C>
double weighted_norm(const Series<C>& f, const NormParams& p) {
    double total = 0.0;
    for (const auto& [idx, c] : f.terms())
        total += scalar_traits<C>::abs(c) * std::exp(p.r * idx.p_norm()) * std::pow(p.delta, idx.q_norm());
    return total;
}

/// Inverse of a unit with constant part 1 via the finite Neumann sum
/// sum_j (1-f)^j, truncated at cap. Requires every non-constant term to
/// have |Q| >= 1, otherwise the sum does not terminate in the Y-order.
template <class C>
Series<C> invert_unit(const Series<C>& f) {
    using Traits = scalar_traits<C>;
    const Dims dims = f.dims();
    const MultiIndex origin(std::vector<int>(dims.d, 0), std::vector<int>(dims.n, 0));
    if (!Traits::approx_equal(f.coeff(origin), Traits::one()))
        throw math_error("invert_unit: constant term is not 1");
    for (const auto& [idx, c] : f.terms())
        if (idx.q_norm() == 0 && !(idx == origin))
            throw math_error("invert_unit: unit has order-0 Fourier tail; finite Neumann sum does not terminate");

    Series<C> u = sub(Series<C>::constant(dims, f.cap(), Traits::one()), f); // order >= 1
    Series<C> result = Series<C>::constant(dims, f.cap(), Traits::one());
    Series<C> power = u;
    for (int j = 1; j <= f.cap() && !power.is_zero(); ++j) {
        result = add(result, power);
        power = mul(power, u);
    }
    return result;
}

/// Point evaluation in double-complex arithmetic (test/report support):
/// f(X,Y) = sum c e^{i<P,X>} Y^Q with X in C^d, Y in C^n.
template <class C>
std::complex<double> eval(const Series<C>& f, const std::vector<std::complex<double>>& X,
                          const std::vector<std::complex<double>>& Y) {
    using Traits = scalar_traits<C>;
    if (static_cast<int>(X.size()) != f.dims().d || static_cast<int>(Y.size()) != f.dims().n)
        throw validation_error("evaluation point dimension mismatch");
    const std::complex<double> iunit(0.0, 1.0);
    std::complex<double> total = 0.0;
    for (const auto& [idx, c] : f.terms()) {
        std::complex<double> phase = 0.0;
        for (std::size_t j = 0; j < X.size(); ++j) phase += static_cast<double>(idx.P[j]) * X[j];
        std::complex<double> term = Traits::to_complex(c) * std::exp(iunit * phase);
        for (std::size_t j = 0; j < Y.size(); ++j)
            for (int e = 0; e < idx.Q[j]; ++e) term *= Y[j];
        total += term;
    }
    return total;
}

/// Largest coefficient magnitude of a - b (0 when structurally equal);
/// the float backend's comparison yardstick.
template <class C>
double max_coeff_delta(const Series<C>& a, const Series<C>& b) {
    double worst = 0.0;
    for (const auto& [idx, c] : a.terms())
        worst = std::max(worst, scalar_traits<C>::abs(c - b.coeff(idx)));
    for (const auto& [idx, c] : b.terms())
        worst = std::max(worst, scalar_traits<C>::abs(c - a.coeff(idx)));
    return worst;
}

} // namespace tnf
