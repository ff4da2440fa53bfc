#pragma once

#include <cmath>

namespace wmh2 {

// Smooth bump machinery: g(t) = exp(-1/t) for t > 0 else 0;
// chi(s) = g(2-s)/(g(2-s)+g(s-1)) is 1 on s <= 1, 0 on s >= 2, C-infinity.
// m_k(s) = chi(s/2^k) - chi(s/2^{k-1}) telescopes exactly:
// sum_{k=a}^{b} m_k(s) = 1 for s in [2^a, 2^b].

inline double bump_g(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

inline double chi_cutoff(double s) {
    const double a = bump_g(2.0 - s);
    const double b = bump_g(s - 1.0);
    if (a == 0.0) return 0.0;
    if (b == 0.0) return 1.0;
    return a / (a + b);
}

/// Littlewood-Paley bump at dyadic level k, support in (2^{k-1}, 2^{k+1}), m_k(2^k)=1.
inline double lp_bump(double s, int k) {
    const double p = std::ldexp(1.0, -k); // 2^{-k}
    return chi_cutoff(s * p) - chi_cutoff(s * p * 2.0);
}

/// Fattened bump: m~_k = m_{k-1} + m_k + m_{k+1}; equals 1 on supp m_k.
inline double lp_bump_wide(double s, int k) {
    return lp_bump(s, k - 1) + lp_bump(s, k) + lp_bump(s, k + 1);
}

/// Cumulative cutoff sum_{i<a} m_i = chi(s/2^{a-1}) for s > 0; equals 1 at s=0
/// (the lattice null-cone samples are kept by Q_{<a}).
inline double lp_below(double s, int a) {
    return chi_cutoff(s * std::ldexp(1.0, -(a - 1)));
}

/// C-infinity compactly supported radial profile: 1 at r=0, 0 for r >= radius.
inline double support_bump(double r, double radius) {
    if (r >= radius) return 0.0;
    const double q = r / radius;
    return std::exp(1.0 - 1.0 / (1.0 - q * q));
}

} // namespace wmh2
