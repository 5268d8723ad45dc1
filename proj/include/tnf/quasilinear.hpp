#pragma once

#include <algorithm>
#include <vector>

#include "tnf/multi_index.hpp"
#include "tnf/scalar.hpp"
#include "tnf/series.hpp"

namespace tnf {

/// Frequencies omega in R^d and eigenvalues lambda in C^n defining the
/// quasilinear field S = sum omega_j d/dX_j + sum lambda_j Y_j d/dY_j and
/// every divisor i<P,omega> + <Q,Lambda>.
template <class C>
struct QuasilinearData {
    std::vector<C> omega;  // stored in C with zero imaginary part
    std::vector<C> lambda;

    QuasilinearData(std::vector<C> w, std::vector<C> l)
        : omega(std::move(w)), lambda(std::move(l)) {
        if (omega.empty() || lambda.empty())
            throw validation_error("QuasilinearData requires d >= 1 and n >= 1");
        for (const C& w_j : omega)
            if (scalar_traits<C>::im_double(w_j) != 0.0)
                throw validation_error("omega entries must be real");
    }

    Dims dims() const { return {static_cast<int>(omega.size()), static_cast<int>(lambda.size())}; }

    /// C_omega = max_j |omega_j|.
    double c_omega() const {
        double m = 0.0;
        for (const C& w : omega) m = std::max(m, scalar_traits<C>::abs(w));
        return m;
    }
};

enum class DivisorShift { none, lambda_j };

/// i<P,omega> + <Q,Lambda>.
template <class C>
C divisor(const MultiIndex& idx, const QuasilinearData<C>& qd) {
    using Traits = scalar_traits<C>;
    check_index(idx, qd.dims());
    C along_omega = Traits::zero();
    for (std::size_t j = 0; j < qd.omega.size(); ++j)
        if (idx.P[j] != 0) along_omega += Traits::from_int(idx.P[j]) * qd.omega[j];
    C value = Traits::imaginary_unit() * along_omega;
    for (std::size_t j = 0; j < qd.lambda.size(); ++j)
        if (idx.Q[j] != 0) value += Traits::from_int(idx.Q[j]) * qd.lambda[j];
    return value;
}

/// Divisor with the Y-component convention: subtract lambda_j when the
/// monomial sits in the j-th disk component (shift = lambda_j).
template <class C>
C divisor(const MultiIndex& idx, const QuasilinearData<C>& qd, DivisorShift shift, int j = 0) {
    C value = divisor(idx, qd);
    if (shift == DivisorShift::lambda_j) {
        if (j < 0 || j >= static_cast<int>(qd.lambda.size()))
            throw validation_error("divisor shift index out of range");
        value -= qd.lambda[j];
    }
    return value;
}

/// Divisor seen by component L of a vector field (0-based): plain for the
/// d torus rows, shifted by lambda_{L-d} for the disk rows.
template <class C>
C component_divisor(const MultiIndex& idx, const QuasilinearData<C>& qd, int component) {
    const int d = static_cast<int>(qd.omega.size());
    if (component < d) return divisor(idx, qd);
    return divisor(idx, qd, DivisorShift::lambda_j, component - d);
}

/// True divisor vanishing: exact on the exact backend, |divisor| <= tau_res
/// on the floating backend.
template <class C>
bool divisor_vanishes(const C& value) {
    if constexpr (scalar_traits<C>::exact) {
        return scalar_traits<C>::is_zero(value);
    } else {
        return scalar_traits<C>::abs(value) <= float_config::resonance_tol();
    }
}

template <class C>
bool is_resonant(const MultiIndex& idx, const QuasilinearData<C>& qd,
                 DivisorShift shift = DivisorShift::none, int j = 0) {
    return divisor_vanishes(divisor(idx, qd, shift, j));
}

} // namespace tnf
