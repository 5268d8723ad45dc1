#pragma once

#include <cmath>

#include "tnf/errors.hpp"

namespace tnf {

/// Intermediate analyticity radii for one iteration step: quarter steps in
/// the strip width between r_k and r_{k+1}, geometric steps in the disk
/// radius driven by g(m_k)^(-D''/m_k) with D'' = 10 + 6n.
struct RadiiLadder {
    double r, r1, r2, r3, r4;                // r_k, r', r'', r_3, r_{k+1}
    double delta, delta1, delta2, delta3, delta4; // delta_k, delta', delta'', delta_3, delta_{k+1}
};

inline RadiiLadder radii_ladder(double r_k, double r_next, double delta_k, double delta_next,
                                double g_mk, long long m_k, int n) {
    if (!(r_k > r_next)) throw validation_error("radii_ladder requires r_k > r_{k+1}");
    if (!(delta_k > 0.0) || !(g_mk > 0.0) || m_k < 1)
        throw validation_error("radii_ladder requires positive delta_k, g(m_k) and m_k >= 1");
    const double D2 = 10.0 + 6.0 * n;
    RadiiLadder lad;
    lad.r = r_k;
    const double gap = r_k - r_next;
    lad.r1 = r_k - 0.25 * gap;
    lad.r2 = r_k - 0.5 * gap;
    lad.r3 = r_k - 0.75 * gap;
    lad.r4 = r_next;
    lad.delta = delta_k;
    lad.delta2 = delta_k * std::pow(g_mk, -D2 / static_cast<double>(m_k));
    lad.delta1 = std::sqrt(lad.delta2 * delta_k);
    lad.delta3 = lad.delta2 * lad.delta2 / lad.delta1;
    lad.delta4 = delta_next;
    return lad;
}

} // namespace tnf
