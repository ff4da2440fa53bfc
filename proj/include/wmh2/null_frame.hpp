#pragma once

#include "wmh2/caps.hpp"

namespace wmh2 {

// Null-frame coordinates adapted to a unit direction omega:
//   t_w = (t,x) . (1,omega)/sqrt(2),   x_w = (t,x) - t_w (1,omega)/sqrt(2),
// with x_w parametrized in the orthonormal basis {(1,-omega)/sqrt(2), (0,e1), (0,e2)}.
// Resampling is separable cubic Lagrange (4-point) per axis: reproduces
// cubics, so the error is 4th order in the grid spacing.

struct NullFrameView {
    GridSpec grid;          // same sample counts/spacings as the source
    Vec3 omega;
    std::array<double, 4> center_out{}; // window center in (t_w, x_w) coords
    std::array<double, 4> center_in{};  // source window center in (t, x)
    int interp_order = 4;
    std::vector<cplx> data; // indexed (it, i1, i2, i3) like SpacetimeField

    std::size_t idx(std::uint32_t t, std::uint32_t i, std::uint32_t j, std::uint32_t k) const {
        return ((std::size_t(t) * grid.n + i) * grid.n + j) * grid.n + k;
    }
};

namespace detail {

inline void cubic_weights(double s, double w[4]) {
    // Lagrange basis on nodes {-1,0,1,2} evaluated at s in [0,1)
    w[0] = -s * (s - 1.0) * (s - 2.0) / 6.0;
    w[1] = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    w[2] = -(s + 1.0) * s * (s - 2.0) / 2.0;
    w[3] = (s + 1.0) * s * (s - 1.0) / 6.0;
}

inline std::int64_t wrap_index(std::int64_t i, std::int64_t n) {
    i %= n;
    return i < 0 ? i + n : i;
}
inline std::int64_t clamp_index(std::int64_t i, std::int64_t n) {
    return std::max<std::int64_t>(0, std::min<std::int64_t>(n - 1, i));
}

/// 4D separable cubic interpolation of a (T,n,n,n) sample block at continuous
/// sample coordinates u (units of samples). Space wraps; time wraps only for
/// periodic sources.
inline cplx interp4(const cplx* f, std::uint32_t T, std::uint32_t n, bool time_wraps,
                    const std::array<double, 4>& u) {
    std::int64_t base[4];
    double wt[4][4];
    for (int a = 0; a < 4; ++a) {
        const double fl = std::floor(u[a]);
        base[a] = std::int64_t(fl) - 1;
        cubic_weights(u[a] - fl, wt[a]);
    }
    const std::int64_t nn = n;
    const std::size_t sk = 1, sj = n, si = std::size_t(n) * n, st = std::size_t(n) * n * n;
    cplx acc_t(0.0);
    for (int a = 0; a < 4; ++a) {
        const std::int64_t it = time_wraps ? wrap_index(base[0] + a, T) : clamp_index(base[0] + a, T);
        cplx acc_i(0.0);
        for (int b = 0; b < 4; ++b) {
            const std::int64_t ii = wrap_index(base[1] + b, nn);
            cplx acc_j(0.0);
            for (int c = 0; c < 4; ++c) {
                const std::int64_t jj = wrap_index(base[2] + c, nn);
                const cplx* row = f + std::size_t(it) * st + std::size_t(ii) * si + std::size_t(jj) * sj;
                cplx acc_k(0.0);
                for (int d = 0; d < 4; ++d) {
                    const std::int64_t kk = wrap_index(base[3] + d, nn);
                    acc_k += wt[3][d] * row[std::size_t(kk) * sk];
                }
                acc_j += wt[2][c] * acc_k;
            }
            acc_i += wt[1][b] * acc_j;
        }
        acc_t += wt[0][a] * acc_i;
    }
    return acc_t;
}

inline void omega_basis(const Vec3& omega, Vec3& e1, Vec3& e2) {
    Vec3 up = std::abs(omega.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    e1 = omega.cross(up).normalized();
    e2 = omega.cross(e1).normalized();
}

} // namespace detail

/// Resample f on a regular grid in (t_w, x_w) coordinates, centered at the
/// image of the source window center, with the source spacings.
inline NullFrameView null_frame_transform(const SpacetimeField& f, const Vec3& omega) {
    if (std::abs(omega.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("null_frame_transform: omega must be a unit vector");

    const GridSpec& g = f.grid;
    NullFrameView view;
    view.grid = g;
    view.omega = omega;
    view.data.resize(g.total_size());

    Vec3 e1, e2;
    detail::omega_basis(omega, e1, e2);
    const double r2 = 1.0 / std::sqrt(2.0);

    // window centers
    const double ct = 0.5 * g.time_window();
    const Vec3 cx{0.5 * g.length, 0.5 * g.length, 0.5 * g.length};
    view.center_in = {ct, cx.x, cx.y, cx.z};
    view.center_out = {r2 * (ct + omega.dot(cx)), r2 * (ct - omega.dot(cx)), e1.dot(cx), e2.dot(cx)};

    const double dxs = g.dx();
    const double dts = g.dt;
    const std::uint32_t T = g.t_samples, n = g.n;

    std::size_t p = 0;
    for (std::uint32_t it = 0; it < T; ++it) {
        const double tw = view.center_out[0] + (double(it) - 0.5 * T) * dts;
        for (std::uint32_t i1 = 0; i1 < n; ++i1) {
            const double x1 = view.center_out[1] + (double(i1) - 0.5 * n) * dxs;
            for (std::uint32_t i2 = 0; i2 < n; ++i2) {
                const double x2 = view.center_out[2] + (double(i2) - 0.5 * n) * dxs;
                for (std::uint32_t i3 = 0; i3 < n; ++i3, ++p) {
                    const double x3 = view.center_out[3] + (double(i3) - 0.5 * n) * dxs;
                    // back to (t, x)
                    const double t = r2 * (tw + x1);
                    const Vec3 x = (omega * (r2 * (tw - x1))) + (e1 * x2) + (e2 * x3);
                    const std::array<double, 4> u = {t / dts, x.x / dxs, x.y / dxs, x.z / dxs};
                    view.data[p] =
                        detail::interp4(f.data.data(), T, n, g.time_periodic, u);
                }
            }
        }
    }
    return view;
}

/// Inverse resampling back to (t, x); exact inverse map, interpolation error only.
inline SpacetimeField inverse_null_frame_transform(const NullFrameView& view) {
    const GridSpec& g = view.grid;
    SpacetimeField out(g);

    Vec3 e1, e2;
    detail::omega_basis(view.omega, e1, e2);
    const double r2 = 1.0 / std::sqrt(2.0);
    const double dxs = g.dx(), dts = g.dt;
    const std::uint32_t T = g.t_samples, n = g.n;

    std::size_t p = 0;
    for (std::uint32_t it = 0; it < T; ++it) {
        const double t = (double(it)) * dts;
        for (std::uint32_t i = 0; i < n; ++i) {
            for (std::uint32_t j = 0; j < n; ++j) {
                for (std::uint32_t k = 0; k < n; ++k, ++p) {
                    const Vec3 x{i * dxs, j * dxs, k * dxs};
                    const double tw = r2 * (t + view.omega.dot(x));
                    const double x1 = r2 * (t - view.omega.dot(x));
                    const double x2 = e1.dot(x), x3 = e2.dot(x);
                    // continuous sample coordinates in the view grid (clamped; the
                    // view window is not periodic in its own axes)
                    const std::array<double, 4> u = {
                        (tw - view.center_out[0]) / dts + 0.5 * T,
                        (x1 - view.center_out[1]) / dxs + 0.5 * n,
                        (x2 - view.center_out[2]) / dxs + 0.5 * n,
                        (x3 - view.center_out[3]) / dxs + 0.5 * n};
                    std::array<double, 4> uc = u;
                    for (int a = 0; a < 4; ++a) {
                        const double hi = (a == 0 ? T : n) - 1.0;
                        uc[a] = std::max(0.0, std::min(hi, uc[a]));
                    }
                    out.data[p] = detail::interp4(view.data.data(), T, n, false, uc);
                }
            }
        }
    }
    return out;
}

/// ||g||_{L^inf_{t_w} L^2_{x_w}} on the resampled window.
inline double linf_t_l2_x(const NullFrameView& v) {
    const std::size_t ns = v.grid.spatial_size();
    const double dvol = v.grid.dx() * v.grid.dx() * v.grid.dx();
    double best = 0.0;
    for (std::uint32_t t = 0; t < v.grid.t_samples; ++t) {
        double s = 0.0;
        for (std::size_t i = 0; i < ns; ++i) s += std::norm(v.data[std::size_t(t) * ns + i]);
        best = std::max(best, std::sqrt(s * dvol));
    }
    return best;
}

/// ||g||_{L^2_{t_w} L^inf_{x_w}} on the resampled window.
inline double l2_t_linf_x(const NullFrameView& v) {
    const std::size_t ns = v.grid.spatial_size();
    double acc = 0.0;
    for (std::uint32_t t = 0; t < v.grid.t_samples; ++t) {
        double m = 0.0;
        for (std::size_t i = 0; i < ns; ++i) m = std::max(m, std::abs(v.data[std::size_t(t) * ns + i]));
        acc += m * m;
    }
    return std::sqrt(acc * v.grid.dt);
}

/// ||g||_{L^1_{t_w} L^2_{x_w}} (dual-side norm used by NFA).
inline double l1_t_l2_x(const NullFrameView& v) {
    const std::size_t ns = v.grid.spatial_size();
    const double dvol = v.grid.dx() * v.grid.dx() * v.grid.dx();
    double acc = 0.0;
    for (std::uint32_t t = 0; t < v.grid.t_samples; ++t) {
        double s = 0.0;
        for (std::size_t i = 0; i < ns; ++i) s += std::norm(v.data[std::size_t(t) * ns + i]);
        acc += std::sqrt(s * dvol);
    }
    return acc * v.grid.dt;
}

} // namespace wmh2
