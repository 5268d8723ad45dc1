#pragma once

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "tnf/errors.hpp"

namespace tnf {

/// Phase-space dimensions: d torus (angle) variables X, n disk variables Y.
struct Dims {
    int d = 0;
    int n = 0;
    friend bool operator==(const Dims&, const Dims&) = default;
};

/// Index of one monomial e^{i<P,X>} Y^Q: P ranges over Z^d, Q over N^n.
struct MultiIndex {
    std::vector<int> P;
    std::vector<int> Q;

    MultiIndex() = default;
    MultiIndex(std::vector<int> p, std::vector<int> q) : P(std::move(p)), Q(std::move(q)) {}

    /// |P| = sum of absolute values of the Fourier entries.
    int p_norm() const {
        int s = 0;
        for (int v : P) s += std::abs(v);
        return s;
    }
    /// |Q| = total Taylor degree in Y.
    int q_norm() const { return std::accumulate(Q.begin(), Q.end(), 0); }

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

inline void check_index(const MultiIndex& idx, const Dims& dims) {
    if (static_cast<int>(idx.P.size()) != dims.d || static_cast<int>(idx.Q.size()) != dims.n)
        throw validation_error("multi-index dimensions do not match (d,n)");
    for (int q : idx.Q)
        if (q < 0) throw validation_error("negative Taylor exponent");
}

/// Report-stable term order: (|Q|, Q lexicographic, |P|, P lexicographic).
/// Grouping by total Y-degree first also makes degree slicing cheap.
struct IndexOrder {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const {
        const int qa = a.q_norm(), qb = b.q_norm();
        if (qa != qb) return qa < qb;
        if (a.Q != b.Q) return a.Q < b.Q;
        const int pa = a.p_norm(), pb = b.p_norm();
        if (pa != pb) return pa < pb;
        return a.P < b.P;
    }
};

inline std::string index_str(const MultiIndex& idx) {
    std::string s = "P=(";
    for (std::size_t j = 0; j < idx.P.size(); ++j) {
        if (j) s += ",";
        s += std::to_string(idx.P[j]);
    }
    s += ") Q=(";
    for (std::size_t j = 0; j < idx.Q.size(); ++j) {
        if (j) s += ",";
        s += std::to_string(idx.Q[j]);
    }
    s += ")";
    return s;
}

} // namespace tnf
