#pragma once

#include <array>
#include <limits>
#include <string>
#include <tuple>
#include <utility>

#include "wmh2/multipliers.hpp"

namespace wmh2 {

// Wave map (x,y): R^{3+1} -> H^2 evolved directly in map variables; the
// div-curl system for the derived frame is kept as an independent check.
//
// Frame convention: phi^1_a = d_a x / y, phi^2_a = -d_a y / y, i.e. the
// orthonormal frame {y d_x, -y d_y}. With this orientation the div-curl
// system and every identity downstream of it hold in the form used here.

struct WaveMapState {
    GridSpec grid; // t_samples ignored (one instant)
    double t = 0.0;
    ScalarField3 x, y, xt, yt;

    explicit WaveMapState(const GridSpec& g) : grid(g), x(g), y(g), xt(g), yt(g) {
        for (auto& v : y.data) v = 1.0; // constant map default
    }

    double min_y() const {
        double m = std::numeric_limits<double>::max();
        for (const auto& v : y.data) m = std::min(m, v.real());
        return m;
    }
};

/// phi[a][alpha], a in {0,1} (frame index 1,2), alpha in {0..3}.
struct DerivedFrame {
    GridSpec grid;
    std::array<std::array<ScalarField3, 4>, 2> phi;
};

struct Diagnostics {
    double t = 0.0;
    double energy = 0.0;
    double hdot_half = 0.0;
    double min_y = 0.0;
};

struct RunRecord {
    GridSpec grid;
    double snapshot_dt = 0.0; // stride * dt
    bool keep_states = true;
    std::vector<double> times;
    std::vector<WaveMapState> states;
    std::vector<Diagnostics> diag;
};

// ---- pointwise helpers -------------------------------------------------------

namespace detail {
inline ScalarField3 pointwise_div(const ScalarField3& a, const ScalarField3& b) {
    ScalarField3 out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] /= b.data[i];
    return out;
}
} // namespace detail

// ---- operations ---------------------------------------------------------------

inline DerivedFrame derived_frame(const WaveMapState& s) {
    DerivedFrame f;
    f.grid = s.grid;
    f.phi[0][0] = detail::pointwise_div(s.xt, s.y);
    f.phi[1][0] = scaled(detail::pointwise_div(s.yt, s.y), -1.0);
    for (int j = 1; j <= 3; ++j) {
        f.phi[0][j] = detail::pointwise_div(partial(s.x, j), s.y);
        f.phi[1][j] = scaled(detail::pointwise_div(partial(s.y, j), s.y), -1.0);
    }
    return f;
}

/// Conserved energy: integral of sum_a |phi^a_0|^2 + sum_{a,j} |phi^a_j|^2.
inline double energy(const DerivedFrame& f) {
    double e = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int al = 0; al < 4; ++al) {
            const double n = l2_norm(f.phi[a][al]);
            e += n * n;
        }
    return e;
}

inline double hdot_half(const ScalarField3& f) { return hs_norm(f, 0.5); }

/// ||(grad(x,y)/y, d_t(x,y)/y)||_{Hdot^{1/2}}: root-sum-square over the 8
/// frame components (frame orientation does not affect it).
inline double hdot_half(const DerivedFrame& f) {
    double s = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int al = 0; al < 4; ++al) {
            const double n = hs_norm(f.phi[a][al], 0.5);
            s += n * n;
        }
    return std::sqrt(s);
}

inline double hdot_half(const WaveMapState& s) { return hdot_half(derived_frame(s)); }

/// Right-hand side of the second-order system:
///   xtt = Lap x + (2/y)(xt yt - grad x . grad y)
///   ytt = Lap y - (1/y)(xt^2 - |grad x|^2 - yt^2 + |grad y|^2)
/// Quadratic derivative products are dealiased by the 2/3 rule; the pointwise
/// 1/y factor is not (it is not polynomial).
inline std::pair<ScalarField3, ScalarField3> wave_rhs(const WaveMapState& s) {
    if (s.min_y() <= 0.0)
        throw std::runtime_error("wave_rhs: min(y) <= 0, map left the upper half-plane (t=" +
                                 std::to_string(s.t) + ")");
    const ScalarField3 lx = laplacian(s.x), ly = laplacian(s.y);
    std::array<ScalarField3, 3> gx, gy;
    for (int j = 1; j <= 3; ++j) {
        gx[j - 1] = partial(s.x, j);
        gy[j - 1] = partial(s.y, j);
    }
    ScalarField3 P = s.xt * s.yt;
    ScalarField3 Q = s.xt * s.xt - s.yt * s.yt;
    for (int j = 0; j < 3; ++j) {
        P = P - gx[j] * gy[j];
        Q = Q - gx[j] * gx[j] + gy[j] * gy[j];
    }
    P = dealias_two_thirds(P);
    Q = dealias_two_thirds(Q);
    ScalarField3 xtt = lx, ytt = ly;
    for (std::size_t i = 0; i < xtt.data.size(); ++i) {
        const cplx yv = s.y.data[i];
        xtt.data[i] += 2.0 * P.data[i] / yv;
        ytt.data[i] -= Q.data[i] / yv;
    }
    return {xtt, ytt};
}

inline double cfl_limit(const GridSpec& g, double c_cfl) { return c_cfl * g.length / (g.n * kPi); }

/// One classical RK4 step of the first-order system (x, y, xt, yt).
inline WaveMapState step(const WaveMapState& s, double dt) {
    auto deriv = [](const WaveMapState& u) {
        auto [xtt, ytt] = wave_rhs(u);
        return std::array<ScalarField3, 4>{u.xt, u.yt, xtt, ytt};
    };
    auto advance = [](const WaveMapState& u, const std::array<ScalarField3, 4>& d, double h) {
        WaveMapState v = u;
        for (std::size_t i = 0; i < u.x.data.size(); ++i) {
            v.x.data[i] = u.x.data[i] + h * d[0].data[i];
            v.y.data[i] = u.y.data[i] + h * d[1].data[i];
            v.xt.data[i] = u.xt.data[i] + h * d[2].data[i];
            v.yt.data[i] = u.yt.data[i] + h * d[3].data[i];
        }
        v.t = u.t + h;
        return v;
    };
    const auto k1 = deriv(s);
    const auto k2 = deriv(advance(s, k1, dt / 2));
    const auto k3 = deriv(advance(s, k2, dt / 2));
    const auto k4 = deriv(advance(s, k3, dt));
    WaveMapState out = s;
    for (std::size_t i = 0; i < s.x.data.size(); ++i) {
        out.x.data[i] += dt / 6.0 * (k1[0].data[i] + 2.0 * k2[0].data[i] + 2.0 * k3[0].data[i] + k4[0].data[i]);
        out.y.data[i] += dt / 6.0 * (k1[1].data[i] + 2.0 * k2[1].data[i] + 2.0 * k3[1].data[i] + k4[1].data[i]);
        out.xt.data[i] += dt / 6.0 * (k1[2].data[i] + 2.0 * k2[2].data[i] + 2.0 * k3[2].data[i] + k4[2].data[i]);
        out.yt.data[i] += dt / 6.0 * (k1[3].data[i] + 2.0 * k2[3].data[i] + 2.0 * k3[3].data[i] + k4[3].data[i]);
    }
    out.t = s.t + dt;
    return out;
}

inline Diagnostics diagnostics_of(const WaveMapState& s) {
    const DerivedFrame f = derived_frame(s);
    return {s.t, energy(f), hdot_half(f), s.min_y()};
}

inline constexpr double kBlowupMinY = 1e-3;

/// Evolve for nsteps of size dt, invoking `on_snapshot` every `stride` steps
/// (and at t = 0). Guards: y positivity and 10x energy growth abort the run.
template <class Fn>
void run_with_callback(const WaveMapState& s0, double dt, std::uint64_t nsteps,
                       std::uint32_t stride, double c_cfl, Fn on_snapshot) {
    if (!(dt > 0.0)) throw std::invalid_argument("run: dt must be > 0");
    if (dt > cfl_limit(s0.grid, c_cfl))
        throw std::invalid_argument("run: dt=" + std::to_string(dt) + " above CFL bound " +
                                    std::to_string(cfl_limit(s0.grid, c_cfl)));
    if (stride == 0) stride = 1;
    WaveMapState s = s0;
    const double e0 = diagnostics_of(s).energy;
    on_snapshot(s, diagnostics_of(s));
    for (std::uint64_t i = 1; i <= nsteps; ++i) {
        s = step(s, dt);
        if (s.min_y() < kBlowupMinY)
            throw std::runtime_error("run: blow-up guard tripped, min(y)=" +
                                     std::to_string(s.min_y()) + " at t=" + std::to_string(s.t));
        if (i % stride == 0) {
            const Diagnostics d = diagnostics_of(s);
            if (e0 > 0.0 && d.energy > 10.0 * e0)
                throw std::runtime_error("run: instability detected, energy grew " +
                                         std::to_string(d.energy / e0) + "x at t=" +
                                         std::to_string(s.t));
            on_snapshot(s, d);
        }
    }
}

/// Evolve for nsteps of size dt, recording every `stride` steps.
inline RunRecord run(const WaveMapState& s0, double dt, std::uint64_t nsteps, std::uint32_t stride,
                     double c_cfl = 1.0, bool keep_states = true) {
    RunRecord rec;
    rec.grid = s0.grid;
    rec.snapshot_dt = (stride == 0 ? 1 : stride) * dt;
    rec.keep_states = keep_states;
    run_with_callback(s0, dt, nsteps, stride, c_cfl, [&](const WaveMapState& st, const Diagnostics& d) {
        rec.times.push_back(st.t);
        rec.diag.push_back(d);
        if (keep_states) rec.states.push_back(st);
    });
    return rec;
}

// ---- initial data --------------------------------------------------------------

struct BumpParams {
    std::array<double, 3> center{};  // defaults to box center
    double radius = 0.5;             // support radius, must be < L/4
    double amp_x = 1.0;
    double amp_y = 0.4;
    double amp_xt = 0.7;
    double amp_yt = 0.3;
    bool centered = false; // true once center was set explicitly
};

namespace detail {

inline ScalarField3 bump_field(const GridSpec& g, const std::array<double, 3>& c, double radius) {
    ScalarField3 f(g);
    for (std::uint32_t i = 0; i < g.n; ++i)
        for (std::uint32_t j = 0; j < g.n; ++j)
            for (std::uint32_t k = 0; k < g.n; ++k) {
                // nearest periodic image
                double d2 = 0.0;
                const double p[3] = {i * g.dx(), j * g.dx(), k * g.dx()};
                for (int a = 0; a < 3; ++a) {
                    double d = std::fmod(std::abs(p[a] - c[a]), g.length);
                    d = std::min(d, g.length - d);
                    d2 += d * d;
                }
                f.at(i, j, k) = support_bump(std::sqrt(d2), radius);
            }
    return f;
}

inline WaveMapState scaled_bump_state(const GridSpec& g, const ScalarField3& bump,
                                      const BumpParams& p, double s) {
    WaveMapState st(g);
    for (std::size_t i = 0; i < bump.data.size(); ++i) {
        const double b = bump.data[i].real();
        st.x.data[i] = s * p.amp_x * b;
        st.y.data[i] = 1.0 + s * p.amp_y * b;
        st.xt.data[i] = s * p.amp_xt * b;
        st.yt.data[i] = s * p.amp_yt * b;
    }
    return st;
}

} // namespace detail

/// Compactly supported smooth data with the target Hdot^{1/2} size epsilon
/// (within 1%), solved for by bisection on a global amplitude.
inline WaveMapState initial_data(const GridSpec& g, BumpParams p, double epsilon) {
    if (epsilon < 0.0) throw std::invalid_argument("initial_data: epsilon must be >= 0");
    if (!p.centered)
        p.center = {0.5 * g.length, 0.5 * g.length, 0.5 * g.length};
    if (!(p.radius > 0.0) || p.radius >= 0.25 * g.length)
        throw std::invalid_argument("initial_data: bump radius must lie strictly inside L/4");
    const double amp_scale = std::abs(p.amp_x) + std::abs(p.amp_y) + std::abs(p.amp_xt) + std::abs(p.amp_yt);
    if (epsilon == 0.0) return WaveMapState(g); // constant map limit
    if (amp_scale == 0.0)
        throw std::invalid_argument("initial_data: epsilon > 0 unreachable with zero bump amplitudes");

    const ScalarField3 bump = detail::bump_field(g, p.center, p.radius);
    auto norm_of = [&](double s) { return hdot_half(detail::scaled_bump_state(g, bump, p, s)); };

    // bracket then bisect; the norm is continuous and increasing for small s
    double lo = 0.0, hi = 1.0;
    while (norm_of(hi) < epsilon) {
        hi *= 2.0;
        if (hi > 1e6) throw std::invalid_argument("initial_data: epsilon unreachable (y would cross 0)");
        if (detail::scaled_bump_state(g, bump, p, hi).min_y() <= 0.5) {
            hi /= 2.0; // keep y > 1/2
            if (norm_of(hi) < epsilon)
                throw std::invalid_argument("initial_data: epsilon unreachable while keeping y > 1/2");
            break;
        }
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (norm_of(mid) < epsilon) lo = mid; else hi = mid;
        if (std::abs(norm_of(0.5 * (lo + hi)) - epsilon) <= 1e-3 * epsilon) break;
    }
    return detail::scaled_bump_state(g, bump, p, 0.5 * (lo + hi));
}

// ---- frame time derivatives (chain rule; the alpha=0 rows use wave_rhs) --------

/// d_t phi^a_alpha at one instant.
inline DerivedFrame frame_time_derivative(const WaveMapState& s) {
    auto [xtt, ytt] = wave_rhs(s);
    DerivedFrame d;
    d.grid = s.grid;
    auto over_y = [&](const ScalarField3& f) { return detail::pointwise_div(f, s.y); };
    const ScalarField3 yt_over_y = over_y(s.yt);
    // d_t(xt/y) = xtt/y - (xt/y)(yt/y)
    d.phi[0][0] = over_y(xtt) - over_y(s.xt) * yt_over_y;
    // d_t(-yt/y) = -(ytt/y) + (yt/y)^2
    d.phi[1][0] = scaled(over_y(ytt), -1.0) + yt_over_y * yt_over_y;
    for (int j = 1; j <= 3; ++j) {
        d.phi[0][j] = over_y(partial(s.xt, j)) - over_y(partial(s.x, j)) * yt_over_y;
        d.phi[1][j] = scaled(over_y(partial(s.yt, j)) - over_y(partial(s.y, j)) * yt_over_y, -1.0);
    }
    return d;
}

// ---- div-curl residuals ---------------------------------------------------------

struct DivCurlReport {
    double eq1_space = 0.0; // curl of phi^1, spatial index pairs
    double eq1_time = 0.0;  // pairs involving alpha or beta = 0
    double eq2_space = 0.0;
    double eq2_time = 0.0;
    double eq3 = 0.0;
    double eq4 = 0.0;
    double max_residual() const {
        return std::max({eq1_space, eq1_time, eq2_space, eq2_time, eq3, eq4});
    }
};

namespace detail {
inline double rel_resid(const ScalarField3& lhs, const ScalarField3& rhs) {
    return rel_l2_error(lhs, rhs);
}
} // namespace detail

/// Residuals of the frame div-curl system
///   d_b phi^1_a - d_a phi^1_b = phi^1_a phi^2_b - phi^1_b phi^2_a
///   d_b phi^2_a - d_a phi^2_b = 0
///   d_a phi^{1a} = -phi^1_a phi^{2a},   d_a phi^{2a} = +phi^1_a phi^{1a}
/// with the (+,-,-,-) raising convention.
inline DivCurlReport div_curl_residual(const WaveMapState& s) {
    const DerivedFrame f = derived_frame(s);
    const DerivedFrame ft = frame_time_derivative(s);
    DivCurlReport rep;

    auto curl_check = [&](int a /*frame*/, bool with_rhs) {
        double worst_space = 0.0, worst_time = 0.0;
        // spatial pairs (i < j)
        for (int i = 1; i <= 3; ++i)
            for (int j = i + 1; j <= 3; ++j) {
                ScalarField3 lhs = partial(f.phi[a][i], j) - partial(f.phi[a][j], i);
                ScalarField3 rhs(s.grid);
                if (with_rhs)
                    rhs = f.phi[a][i] * f.phi[1 - a][j] - f.phi[a][j] * f.phi[1 - a][i];
                worst_space = std::max(worst_space, detail::rel_resid(lhs, rhs));
            }
        // pairs (alpha = time, beta = j): d_j phi_0 - d_t phi_j = phi_0 phi^2_j - ...
        for (int j = 1; j <= 3; ++j) {
            ScalarField3 lhs = partial(f.phi[a][0], j) - ft.phi[a][j];
            ScalarField3 rhs(s.grid);
            if (with_rhs)
                rhs = f.phi[a][0] * f.phi[1 - a][j] - f.phi[a][j] * f.phi[1 - a][0];
            worst_time = std::max(worst_time, detail::rel_resid(lhs, rhs));
        }
        return std::pair<double, double>(worst_space, worst_time);
    };

    std::tie(rep.eq1_space, rep.eq1_time) = curl_check(0, true);
    std::tie(rep.eq2_space, rep.eq2_time) = curl_check(1, false);

    // divergences: d_t phi_0 - sum_j d_j phi_j
    auto divergence = [&](int a) {
        ScalarField3 d = ft.phi[a][0];
        for (int j = 1; j <= 3; ++j) d = d - partial(f.phi[a][j], j);
        return d;
    };
    auto minkowski_dot = [&](int a, int b) {
        ScalarField3 d = f.phi[a][0] * f.phi[b][0];
        for (int j = 1; j <= 3; ++j) d = d - f.phi[a][j] * f.phi[b][j];
        return d;
    };
    rep.eq3 = detail::rel_resid(divergence(0), scaled(minkowski_dot(0, 1), -1.0));
    rep.eq4 = detail::rel_resid(divergence(1), minkowski_dot(0, 0));
    return rep;
}

// ---- reconstruction ---------------------------------------------------------------

namespace detail {
/// cumulative integral of a uniformly sampled series, 4th-order
/// (cubic Newton-Cotes interior, Adams-Moulton ends)
inline std::vector<double> cumulative_integral(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    std::vector<double> F(n, 0.0);
    if (n < 2) return F;
    if (n < 4) {
        for (std::size_t i = 1; i < n; ++i) F[i] = F[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
        return F;
    }
    auto seg = [&](std::size_t i) {
        if (i == 0) return h * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]) / 24.0;
        if (i + 2 >= n) {
            const std::size_t m = n - 1;
            return h * (9.0 * f[m] + 19.0 * f[m - 1] - 5.0 * f[m - 2] + f[m - 3]) / 24.0;
        }
        return h * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]) / 24.0;
    };
    for (std::size_t i = 1; i < n; ++i) F[i] = F[i - 1] + seg(i - 1);
    return F;
}
} // namespace detail

struct ReconstructionReport {
    double max_rel_err_x = 0.0;
    double max_rel_err_y = 0.0;
};

/// Integrate d_t x = y phi^1_0 and d_t log y = -phi^2_0 from the recorded
/// initial slice and compare to the stored trajectory.
inline ReconstructionReport reconstruct_map(const RunRecord& rec) {
    if (!rec.keep_states || rec.states.size() < 2)
        throw std::invalid_argument("reconstruct_map: record must retain at least two states");
    const std::size_t ns = rec.grid.spatial_size();
    const std::size_t T = rec.states.size();
    const double h = rec.snapshot_dt;

    ReconstructionReport rep;
    std::vector<double> p10(T), p20(T);
    double scale_x = 0.0, scale_y = 0.0;
    for (const auto& s : rec.states) {
        scale_x = std::max(scale_x, max_abs(s.x));
        scale_y = std::max(scale_y, max_abs(s.y));
    }
    for (std::size_t p = 0; p < ns; ++p) {
        for (std::size_t t = 0; t < T; ++t) {
            const auto& s = rec.states[t];
            const double y = s.y.data[p].real();
            p10[t] = s.xt.data[p].real() / y;
            p20[t] = -s.yt.data[p].real() / y; // phi^2_0
        }
        // y(t) = y(0) exp(-int phi^2_0)
        auto I2 = detail::cumulative_integral(p20, h);
        std::vector<double> yrec(T);
        for (std::size_t t = 0; t < T; ++t)
            yrec[t] = rec.states[0].y.data[p].real() * std::exp(-I2[t]);
        // x(t) = x(0) + int y phi^1_0
        std::vector<double> integrand(T);
        for (std::size_t t = 0; t < T; ++t) integrand[t] = yrec[t] * p10[t];
        auto I1 = detail::cumulative_integral(integrand, h);
        for (std::size_t t = 0; t < T; ++t) {
            const double xrec = rec.states[0].x.data[p].real() + I1[t];
            rep.max_rel_err_x = std::max(rep.max_rel_err_x,
                                         std::abs(xrec - rec.states[t].x.data[p].real()) / scale_x);
            rep.max_rel_err_y = std::max(rep.max_rel_err_y,
                                         std::abs(yrec[t] - rec.states[t].y.data[p].real()) / scale_y);
        }
    }
    return rep;
}

// ---- window assembly ----------------------------------------------------------------

/// GridSpec describing the recorded window as a space-time field.
inline GridSpec window_grid(const RunRecord& rec) {
    GridSpec g = rec.grid;
    g.t_samples = std::uint32_t(rec.states.size());
    g.dt = rec.snapshot_dt;
    g.time_periodic = false;
    return g;
}

/// Assemble a SpacetimeField view over the window from a per-state extractor.
template <class Fn> SpacetimeField assemble_window(const RunRecord& rec, Fn extract) {
    if (!rec.keep_states) throw std::invalid_argument("assemble_window: record kept no states");
    SpacetimeField f(window_grid(rec));
    for (std::size_t t = 0; t < rec.states.size(); ++t)
        f.set_slice(std::uint32_t(t), extract(rec.states[t]));
    return f;
}

} // namespace wmh2
