#pragma once

#include <functional>

#include "wmh2/bump.hpp"
#include "wmh2/fft.hpp"

namespace wmh2 {

enum class Half { plus, minus, both };

namespace detail {

inline bool is_nyquist(std::int32_t s, std::uint32_t size) {
    return s == -std::int32_t(size) / 2;
}

// symbol(xi1, xi2, xi3, |xi|) applied to one transformed spatial block.
template <class Sym>
void apply_block(const GridSpec& g, cplx* block, Sym sym, bool kill_nyquist) {
    const std::uint32_t n = g.n;
    std::size_t p = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::int32_t si = GridSpec::signed_index(i, n);
        const double x1 = 2.0 * kPi * si / g.length;
        for (std::uint32_t j = 0; j < n; ++j) {
            const std::int32_t sj = GridSpec::signed_index(j, n);
            const double x2 = 2.0 * kPi * sj / g.length;
            for (std::uint32_t k = 0; k < n; ++k, ++p) {
                const std::int32_t sk = GridSpec::signed_index(k, n);
                if (kill_nyquist &&
                    (is_nyquist(si, n) || is_nyquist(sj, n) || is_nyquist(sk, n))) {
                    block[p] = cplx(0.0);
                    continue;
                }
                const double x3 = 2.0 * kPi * sk / g.length;
                const double a = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
                block[p] *= sym(x1, x2, x3, a);
            }
        }
    }
}

} // namespace detail

/// Apply a spatial Fourier multiplier. Odd/singular symbols pass
/// kill_nyquist=true so real fields stay real.
template <class Sym>
ScalarField3 apply_spatial_symbol(const ScalarField3& f, Sym sym, bool kill_nyquist = false) {
    ScalarField3 out = f;
    fft::forward(out);
    detail::apply_block(out.grid, out.data.data(), sym, kill_nyquist);
    fft::inverse(out);
    return out;
}

template <class Sym>
SpacetimeField apply_spatial_symbol(const SpacetimeField& f, Sym sym, bool kill_nyquist = false) {
    SpacetimeField out = f;
    fft::forward_slices(out);
    for (std::uint32_t t = 0; t < out.grid.t_samples; ++t)
        detail::apply_block(out.grid, out.data.data() + std::size_t(t) * out.grid.spatial_size(),
                            sym, kill_nyquist);
    fft::inverse_slices(out);
    return out;
}

/// Apply a space-time multiplier symbol(tau, xi1, xi2, xi3, |xi|).
template <class Sym>
SpacetimeField apply_spacetime_symbol(const SpacetimeField& f, Sym sym, bool kill_nyquist = false) {
    SpacetimeField out = f;
    fft::forward4(out);
    const GridSpec& g = out.grid;
    const std::size_t ns = g.spatial_size();
    for (std::uint32_t mt = 0; mt < g.t_samples; ++mt) {
        const double tau = g.tau(mt);
        detail::apply_block(
            g, out.data.data() + std::size_t(mt) * ns,
            [&](double x1, double x2, double x3, double a) { return sym(tau, x1, x2, x3, a); },
            kill_nyquist);
    }
    fft::inverse4(out);
    return out;
}

// ---- spectral_core operations ----------------------------------------------

/// Littlewood-Paley projector P_k (spatial |xi| only).
template <class F> F lp_project(const F& f, int k) {
    f.grid.require_k_in_band(k, "lp_project");
    return apply_spatial_symbol(f, [k](double, double, double, double a) {
        return cplx(lp_bump(a, k), 0.0);
    });
}

/// Fattened projector P~_k = P_{k-1}+P_k+P_{k+1}.
template <class F> F lp_project_wide(const F& f, int k) {
    return apply_spatial_symbol(f, [k](double, double, double, double a) {
        return cplx(lp_bump_wide(a, k), 0.0);
    });
}

/// Spatial Riesz transform R_j = d_j (-Lap)^{-1/2}, symbol i xi_j/|xi|.
template <class F> F riesz_spatial(const F& f, int j) {
    if (j < 1 || j > 3) throw std::invalid_argument("riesz_spatial: j must be 1..3");
    return apply_spatial_symbol(
        f,
        [j](double x1, double x2, double x3, double a) {
            if (a == 0.0) return cplx(0.0);
            const double xj = (j == 1) ? x1 : (j == 2) ? x2 : x3;
            return cplx(0.0, xj / a);
        },
        true);
}

/// Lap^{-1} d_j, symbol -i xi_j/|xi|^2.
template <class F> F inv_lap_partial(const F& f, int j) {
    if (j < 1 || j > 3) throw std::invalid_argument("inv_lap_partial: j must be 1..3");
    return apply_spatial_symbol(
        f,
        [j](double x1, double x2, double x3, double a) {
            if (a == 0.0) return cplx(0.0);
            const double xj = (j == 1) ? x1 : (j == 2) ? x2 : x3;
            return cplx(0.0, -xj / (a * a));
        },
        true);
}

/// (-Lap)^{-1/2}, symbol 1/|xi|.
template <class F> F inv_grad(const F& f) {
    return apply_spatial_symbol(f, [](double, double, double, double a) {
        return a == 0.0 ? cplx(0.0) : cplx(1.0 / a, 0.0);
    });
}

/// |xi|^s with zero mode -> 0 for s < 0 (and for s > 0 automatically).
template <class F> F fractional_power(const F& f, double s) {
    return apply_spatial_symbol(f, [s](double, double, double, double a) {
        if (a == 0.0) return s == 0.0 ? cplx(1.0, 0.0) : cplx(0.0);
        return cplx(std::pow(a, s), 0.0);
    });
}

/// Spatial derivative d_j, symbol i xi_j.
template <class F> F partial(const F& f, int j) {
    if (j < 1 || j > 3) throw std::invalid_argument("partial: j must be 1..3");
    return apply_spatial_symbol(
        f,
        [j](double x1, double x2, double x3, double) {
            const double xj = (j == 1) ? x1 : (j == 2) ? x2 : x3;
            return cplx(0.0, xj);
        },
        true);
}

template <class F> F laplacian(const F& f) {
    return apply_spatial_symbol(f, [](double, double, double, double a) {
        return cplx(-a * a, 0.0);
    });
}

template <class F> F inv_laplacian(const F& f) {
    return apply_spatial_symbol(f, [](double, double, double, double a) {
        return a == 0.0 ? cplx(0.0) : cplx(-1.0 / (a * a), 0.0);
    });
}

/// 2/3-rule dealiasing: drop modes with any |signed index| > n/3.
template <class F> F dealias_two_thirds(const F& f) {
    const std::int32_t cut = std::int32_t(f.grid.n) / 3;
    const double xcut = 2.0 * kPi * cut / f.grid.length + 1e-12;
    return apply_spatial_symbol(f, [xcut](double x1, double x2, double x3, double) {
        return (std::abs(x1) > xcut || std::abs(x2) > xcut || std::abs(x3) > xcut) ? cplx(0.0)
                                                                                   : cplx(1.0, 0.0);
    });
}

/// Band-limit per axis (used to build alias-free synthetic inputs).
template <class F> F band_limit_axis(const F& f, std::int32_t max_index) {
    const double xcut = 2.0 * kPi * max_index / f.grid.length + 1e-12;
    return apply_spatial_symbol(f, [xcut](double x1, double x2, double x3, double) {
        return (std::abs(x1) > xcut || std::abs(x2) > xcut || std::abs(x3) > xcut) ? cplx(0.0)
                                                                                   : cplx(1.0, 0.0);
    });
}

template <class F> F drop_mean(const F& f) {
    return apply_spatial_symbol(f, [](double, double, double, double a) {
        return a == 0.0 ? cplx(0.0) : cplx(1.0, 0.0);
    });
}

// ---- space-time operators ---------------------------------------------------

inline void require_modulation_ready(const SpacetimeField& f, const char* who) {
    if (!f.modulation_ready())
        throw std::invalid_argument(std::string(who) +
                                    ": field is neither time-periodic nor tapered; apply "
                                    "taper_window() before modulation-localized operators");
}

inline double half_indicator(double tau, Half h) {
    switch (h) {
        case Half::plus: return tau > 0.0 ? 1.0 : 0.0;
        case Half::minus: return tau < 0.0 ? 1.0 : 0.0;
        case Half::both: return 1.0;
    }
    return 0.0;
}

/// Q_j^{+/-}: multiplier m_j(||tau|-|xi||) chi_{>0}(+-tau).
inline SpacetimeField modulation_project(const SpacetimeField& f, int j, Half h = Half::both) {
    require_modulation_ready(f, "modulation_project");
    return apply_spacetime_symbol(f, [j, h](double tau, double, double, double, double a) {
        const double mu = std::abs(std::abs(tau) - a);
        return cplx(lp_bump(mu, j) * half_indicator(tau, h), 0.0);
    });
}

/// Q^{+/-}_{<a}: cumulative cutoff sum_{i<a} m_i; keeps the exact null-cone samples.
inline SpacetimeField modulation_below(const SpacetimeField& f, int a, Half h = Half::both) {
    require_modulation_ready(f, "modulation_below");
    return apply_spacetime_symbol(f, [a, h](double tau, double, double, double, double axi) {
        const double mu = std::abs(std::abs(tau) - axi);
        return cplx(lp_below(mu, a) * half_indicator(tau, h), 0.0);
    });
}

/// d'Alembertian Box = dtt - Lap, symbol -tau^2 + |xi|^2 (spectral time).
inline SpacetimeField box_operator(const SpacetimeField& f) {
    if (!f.grid.time_periodic)
        throw std::invalid_argument("box_operator: spectral d_t^2 requires a time-periodic field");
    return apply_spacetime_symbol(f, [](double tau, double, double, double, double a) {
        return cplx(-tau * tau + a * a, 0.0);
    });
}

/// Spectral d_t (time-periodic only), symbol i tau.
inline SpacetimeField time_derivative(const SpacetimeField& f) {
    if (!f.grid.time_periodic)
        throw std::invalid_argument("time_derivative: requires a time-periodic field");
    return apply_spacetime_symbol(f, [](double tau, double, double, double, double) {
        return cplx(0.0, tau);
    });
}

/// R_0 = d_t (-Lap)^{-1/2}. Either spectral d_t (periodic field) or a
/// solver-supplied companion derivative field.
inline SpacetimeField riesz_time(const SpacetimeField& f, const SpacetimeField* dt_field = nullptr) {
    if (dt_field) {
        if (!dt_field->grid.same_box(f.grid))
            throw std::invalid_argument("riesz_time: derivative field on a different grid");
        return inv_grad(*dt_field);
    }
    if (!f.grid.time_periodic)
        throw std::invalid_argument(
            "riesz_time: need a time-periodic field or a solver-supplied time derivative");
    return apply_spacetime_symbol(f, [](double tau, double, double, double, double a) {
        return a == 0.0 ? cplx(0.0) : cplx(0.0, tau / a);
    });
}

/// C-infinity taper, =1 on the middle 50% of the window, 0 at the ends.
inline double taper_weight(double frac) {
    const double s = 4.0 * std::abs(frac - 0.5);
    return chi_cutoff(s);
}

inline SpacetimeField taper_window(const SpacetimeField& f) {
    SpacetimeField out = f;
    const std::size_t ns = f.grid.spatial_size();
    for (std::uint32_t t = 0; t < f.grid.t_samples; ++t) {
        const double w = taper_weight((t + 0.5) / double(f.grid.t_samples));
        for (std::size_t i = 0; i < ns; ++i) out.data[std::size_t(t) * ns + i] *= w;
    }
    out.tapered = true;
    return out;
}

// ---- norms in coefficient space ---------------------------------------------

/// Homogeneous Sobolev norm ||f||_{H^s} = (L^3 sum |xi|^{2s} |f^|^2)^{1/2};
/// the zero mode contributes only for s = 0.
inline double hs_norm(const ScalarField3& f, double s) {
    ScalarField3 tmp = f;
    fft::forward(tmp);
    const double inv_n3 = 1.0 / double(f.grid.spatial_size());
    double acc = 0.0;
    const std::uint32_t n = f.grid.n;
    std::size_t p = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        const double x1 = f.grid.xi(i);
        for (std::uint32_t j = 0; j < n; ++j) {
            const double x2 = f.grid.xi(j);
            for (std::uint32_t k = 0; k < n; ++k, ++p) {
                const double x3 = f.grid.xi(k);
                const double a = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
                const double w = (a == 0.0) ? (s == 0.0 ? 1.0 : 0.0) : std::pow(a, 2.0 * s);
                acc += w * std::norm(tmp.data[p] * inv_n3);
            }
        }
    }
    const double l3 = f.grid.length * f.grid.length * f.grid.length;
    return std::sqrt(l3 * acc);
}

inline double l2_norm_coefficients(const ScalarField3& f) { return hs_norm(f, 0.0); }

} // namespace wmh2
