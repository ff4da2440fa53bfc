#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "wmh2/grid.hpp"

namespace wmh2 {

using cplx = std::complex<double>;

/// Complex scalar samples on the spatial box, indexed (i,j,k) row-major.
struct ScalarField3 {
    GridSpec grid;
    std::vector<cplx> data;

    ScalarField3() = default;
    explicit ScalarField3(const GridSpec& g) : grid(g), data(g.spatial_size(), cplx(0.0)) {}

    std::size_t idx(std::uint32_t i, std::uint32_t j, std::uint32_t k) const {
        return (std::size_t(i) * grid.n + j) * grid.n + k;
    }
    cplx& at(std::uint32_t i, std::uint32_t j, std::uint32_t k) { return data[idx(i, j, k)]; }
    const cplx& at(std::uint32_t i, std::uint32_t j, std::uint32_t k) const { return data[idx(i, j, k)]; }
};

/// Complex samples over the recorded window, indexed (t,i,j,k).
/// Modulation operators require time_periodic or a taper (tracked here).
struct SpacetimeField {
    GridSpec grid;
    bool tapered = false;
    std::vector<cplx> data;

    SpacetimeField() = default;
    explicit SpacetimeField(const GridSpec& g) : grid(g), data(g.total_size(), cplx(0.0)) {}

    std::size_t idx(std::uint32_t t, std::uint32_t i, std::uint32_t j, std::uint32_t k) const {
        return ((std::size_t(t) * grid.n + i) * grid.n + j) * grid.n + k;
    }
    cplx& at(std::uint32_t t, std::uint32_t i, std::uint32_t j, std::uint32_t k) {
        return data[idx(t, i, j, k)];
    }
    const cplx& at(std::uint32_t t, std::uint32_t i, std::uint32_t j, std::uint32_t k) const {
        return data[idx(t, i, j, k)];
    }

    ScalarField3 slice(std::uint32_t t) const {
        ScalarField3 s(grid);
        std::copy_n(data.begin() + std::size_t(t) * grid.spatial_size(), grid.spatial_size(),
                    s.data.begin());
        return s;
    }
    void set_slice(std::uint32_t t, const ScalarField3& s) {
        std::copy(s.data.begin(), s.data.end(), data.begin() + std::size_t(t) * grid.spatial_size());
    }

    bool modulation_ready() const { return grid.time_periodic || tapered; }
};

// ---- elementwise algebra ---------------------------------------------------

namespace detail {
template <class F, class Op> F zip(const F& a, const F& b, Op op) {
    if (a.data.size() != b.data.size()) throw std::invalid_argument("field size mismatch");
    F out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = op(a.data[i], b.data[i]);
    return out;
}
} // namespace detail

template <class F> F operator+(const F& a, const F& b) {
    return detail::zip(a, b, [](cplx x, cplx y) { return x + y; });
}
template <class F> F operator-(const F& a, const F& b) {
    return detail::zip(a, b, [](cplx x, cplx y) { return x - y; });
}
/// pointwise product
template <class F> F operator*(const F& a, const F& b) {
    return detail::zip(a, b, [](cplx x, cplx y) { return x * y; });
}
template <class F> F scaled(const F& a, cplx s) {
    F out = a;
    for (auto& v : out.data) v *= s;
    return out;
}
template <class F> F conj_field(const F& a) {
    F out = a;
    for (auto& v : out.data) v = std::conj(v);
    return out;
}
template <class F> F real_part(const F& a) {
    F out = a;
    for (auto& v : out.data) v = cplx(v.real(), 0.0);
    return out;
}
template <class F> F imag_part(const F& a) {
    F out = a;
    for (auto& v : out.data) v = cplx(v.imag(), 0.0);
    return out;
}

template <class F> double max_abs(const F& a) {
    double m = 0.0;
    for (const auto& v : a.data) m = std::max(m, std::abs(v));
    return m;
}
template <class F> double max_imag(const F& a) {
    double m = 0.0;
    for (const auto& v : a.data) m = std::max(m, std::abs(v.imag()));
    return m;
}

/// L2 norm over the box (physical measure; space-time fields integrate dt too).
inline double l2_norm(const ScalarField3& f) {
    double s = 0.0;
    for (const auto& v : f.data) s += std::norm(v);
    return std::sqrt(s * f.grid.cell_volume());
}
inline double l2_norm(const SpacetimeField& f) {
    double s = 0.0;
    for (const auto& v : f.data) s += std::norm(v);
    return std::sqrt(s * f.grid.cell_volume() * f.grid.dt);
}

template <class F> double rel_l2_error(const F& a, const F& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        num += std::norm(a.data[i] - b.data[i]);
        den += std::norm(a.data[i]) + std::norm(b.data[i]);
    }
    if (den == 0.0) return std::sqrt(num); // 0/0 handled as absolute residual
    return std::sqrt(num / (0.5 * den));
}

inline cplx mean(const ScalarField3& f) {
    cplx s(0.0);
    for (const auto& v : f.data) s += v;
    return s / double(f.data.size());
}

/// spatial mean per time slice
inline std::vector<cplx> slice_means(const SpacetimeField& f) {
    std::vector<cplx> ms(f.grid.t_samples, cplx(0.0));
    const std::size_t ns = f.grid.spatial_size();
    for (std::uint32_t t = 0; t < f.grid.t_samples; ++t) {
        cplx s(0.0);
        for (std::size_t i = 0; i < ns; ++i) s += f.data[std::size_t(t) * ns + i];
        ms[t] = s / double(ns);
    }
    return ms;
}

} // namespace wmh2
