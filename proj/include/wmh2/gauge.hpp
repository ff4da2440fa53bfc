#pragma once

#include "wmh2/norms.hpp"
#include "wmh2/wavemap.hpp"

namespace wmh2 {

// Coulomb gauge change and dynamic separation. Complex notation:
// phi_a = phi^1_a + i phi^2_a, Phi = Lap^{-1} sum_k d_k phi^1_k,
// psi_a = e^{-i Phi} phi_a. On the torus, relations that use d_a Phi pick up
// the spatial means m_a = mean(phi^1_a); they are carried explicitly.

struct GaugeSlice {
    GridSpec grid;
    ScalarField3 Phi;
    std::array<ScalarField3, 4> psi;
    std::array<cplx, 4> mean_phi1{}; // m_a (real content)
    // chain-rule time derivatives, present when built from a solver state
    bool has_derivatives = false;
    ScalarField3 dt_Phi;
    std::array<ScalarField3, 4> dt_psi;
};

inline ScalarField3 complex_phi(const DerivedFrame& f, int alpha) {
    return f.phi[0][alpha] + scaled(f.phi[1][alpha], cplx(0.0, 1.0));
}

/// Phi = Lap^{-1} sum_k d_k phi^1_k; mean(Phi) = 0 by the zero-mode policy.
inline ScalarField3 coulomb_phase(const DerivedFrame& f) {
    ScalarField3 acc = inv_lap_partial(f.phi[0][1], 1);
    acc = acc + inv_lap_partial(f.phi[0][2], 2);
    acc = acc + inv_lap_partial(f.phi[0][3], 3);
    return real_part(acc);
}

inline ScalarField3 phase_factor(const ScalarField3& Phi, double sign) {
    ScalarField3 out = Phi;
    for (auto& v : out.data) v = std::polar(1.0, sign * v.real());
    return out;
}

/// psi_a = e^{-i Phi} phi_a
inline std::array<ScalarField3, 4> twist(const DerivedFrame& f, const ScalarField3& Phi) {
    if (max_imag(Phi) > 1e-12) throw std::invalid_argument("twist: Phi must be real");
    const ScalarField3 ph = phase_factor(Phi, -1.0);
    std::array<ScalarField3, 4> psi;
    for (int a = 0; a < 4; ++a) psi[a] = ph * complex_phi(f, a);
    return psi;
}

/// phi_a = e^{+i Phi} psi_a, split back into the real frame
inline DerivedFrame untwist(const std::array<ScalarField3, 4>& psi, const ScalarField3& Phi) {
    const ScalarField3 ph = phase_factor(Phi, +1.0);
    DerivedFrame f;
    f.grid = Phi.grid;
    for (int a = 0; a < 4; ++a) {
        const ScalarField3 phi = ph * psi[a];
        f.phi[0][a] = real_part(phi);
        f.phi[1][a] = imag_part(phi);
    }
    return f;
}

/// Full gauge data at one instant, with chain-rule time derivatives.
inline GaugeSlice gauge_slice(const WaveMapState& s) {
    GaugeSlice g;
    g.grid = s.grid;
    const DerivedFrame f = derived_frame(s);
    const DerivedFrame ft = frame_time_derivative(s);
    g.Phi = coulomb_phase(f);
    g.psi = twist(f, g.Phi);
    for (int a = 0; a < 4; ++a) g.mean_phi1[a] = mean(f.phi[0][a]);

    // dt Phi = Lap^{-1} sum_k d_k (dt phi^1_k)
    ScalarField3 dtPhi = inv_lap_partial(ft.phi[0][1], 1);
    dtPhi = dtPhi + inv_lap_partial(ft.phi[0][2], 2);
    dtPhi = dtPhi + inv_lap_partial(ft.phi[0][3], 3);
    g.dt_Phi = real_part(dtPhi);
    const ScalarField3 ph = phase_factor(g.Phi, -1.0);
    for (int a = 0; a < 4; ++a) {
        // dt psi = e^{-iPhi}(dt phi - i dtPhi phi)
        const ScalarField3 dphi = complex_phi(ft, a);
        const ScalarField3 phi = complex_phi(f, a);
        g.dt_psi[a] = ph * (dphi - scaled(g.dt_Phi * phi, cplx(0.0, 1.0)));
    }
    g.has_derivatives = true;
    return g;
}

// ---- dynamic separation -----------------------------------------------------------

struct DynSep {
    ScalarField3 Psi;                 // sum_k R_k psi_k
    ScalarField3 R0Psi;               // grad^{-1} dt Psi
    std::array<ScalarField3, 4> chi;  // psi_a + R_a Psi
};

/// psi_nu = -R_nu Psi + chi_nu. The nu = 0 Riesz needs dt psi_k (solver path).
inline DynSep dynamic_separation(const std::array<ScalarField3, 4>& psi,
                                 const std::array<ScalarField3, 4>* dt_psi = nullptr) {
    DynSep d;
    d.Psi = riesz_spatial(psi[1], 1) + riesz_spatial(psi[2], 2) + riesz_spatial(psi[3], 3);
    if (dt_psi) {
        ScalarField3 dtPsi = riesz_spatial((*dt_psi)[1], 1) + riesz_spatial((*dt_psi)[2], 2) +
                             riesz_spatial((*dt_psi)[3], 3);
        d.R0Psi = inv_grad(dtPsi);
    } else {
        d.R0Psi = ScalarField3(psi[0].grid); // unavailable: reported as zero
    }
    d.chi[0] = psi[0] + d.R0Psi;
    for (int j = 1; j <= 3; ++j) d.chi[j] = psi[j] + riesz_spatial(d.Psi, j);
    return d;
}

/// sum_j d_j chi_j: exact multiplier identity, input independent.
inline double chi_divergence_residual(const DynSep& d, const std::array<ScalarField3, 4>& psi) {
    ScalarField3 div = partial(d.chi[1], 1) + partial(d.chi[2], 2) + partial(d.chi[3], 3);
    double scale = 0.0;
    for (int j = 1; j <= 3; ++j) scale = std::max(scale, l2_norm(partial(psi[j], j)));
    const double r = l2_norm(div);
    return scale > 0.0 ? r / scale : r;
}

// ---- twisted div-curl system --------------------------------------------------------

namespace detail {

/// B_{ab} = psi^1_a psi^2_b - psi^2_a psi^1_b = Im(conj(psi_a) psi_b), real field.
inline ScalarField3 gauge_bracket(const ScalarField3& psi_a, const ScalarField3& psi_b) {
    return imag_part(conj_field(psi_a) * psi_b);
}

/// A-term of index a: Lap^{-1} sum_j d_j B_{aj}
inline ScalarField3 bracket_potential(const std::array<ScalarField3, 4>& psi, int a) {
    ScalarField3 acc = inv_lap_partial(gauge_bracket(psi[a], psi[1]), 1);
    acc = acc + inv_lap_partial(gauge_bracket(psi[a], psi[2]), 2);
    acc = acc + inv_lap_partial(gauge_bracket(psi[a], psi[3]), 3);
    return acc;
}

} // namespace detail

struct TwistedDivCurlReport {
    double curl_space = 0.0; // alpha,beta spatial
    double curl_time = 0.0;  // pairs with a time index
    double divergence = 0.0;
    double max_residual() const { return std::max({curl_space, curl_time, divergence}); }
};

/// Residuals of
///   d_a psi_b - d_b psi_a = i psi_b Lap^{-1} d_j B_{aj} - i psi_a Lap^{-1} d_j B_{bj}
///                           + i (m_a psi_b - m_b psi_a)
///   d_nu psi^nu = i psi^nu Lap^{-1} d_j B_{nu j} + i m_nu psi^nu
/// where the mean terms are the periodic-domain analogue of the Schwartz-space
/// identity (Lap^{-1} Lap = Id - mean on the torus).
inline TwistedDivCurlReport twisted_div_curl_residual(const GaugeSlice& g) {
    if (!g.has_derivatives)
        throw std::invalid_argument("twisted_div_curl_residual: needs solver time derivatives");
    TwistedDivCurlReport rep;
    const auto& psi = g.psi;

    std::array<ScalarField3, 4> pot; // Lap^{-1} sum_j d_j B_{a j}
    for (int a = 0; a < 4; ++a) pot[a] = detail::bracket_potential(psi, a);

    auto rhs_pair = [&](int a, int b) {
        ScalarField3 r = scaled(psi[b] * pot[a] - psi[a] * pot[b], cplx(0.0, 1.0));
        const cplx ma = g.mean_phi1[a], mb = g.mean_phi1[b];
        return r + scaled(psi[b], cplx(0.0, 1.0) * ma) - scaled(psi[a], cplx(0.0, 1.0) * mb);
    };

    for (int a = 1; a <= 3; ++a)
        for (int b = a + 1; b <= 3; ++b) {
            const ScalarField3 lhs = partial(psi[b], a) - partial(psi[a], b);
            rep.curl_space = std::max(rep.curl_space, rel_l2_error(lhs, rhs_pair(a, b)));
        }
    for (int b = 1; b <= 3; ++b) {
        // (0, b) pair: d_0 psi_b - d_b psi_0
        const ScalarField3 lhs = g.dt_psi[b] - partial(psi[0], b);
        rep.curl_time = std::max(rep.curl_time, rel_l2_error(lhs, rhs_pair(0, b)));
    }

    // divergence: d_t psi_0 - sum_j d_j psi_j = i psi^nu pot_nu + i m_nu psi^nu
    ScalarField3 lhs_div = g.dt_psi[0];
    for (int j = 1; j <= 3; ++j) lhs_div = lhs_div - partial(psi[j], j);
    ScalarField3 rhs_div = psi[0] * pot[0] + scaled(psi[0], g.mean_phi1[0]);
    for (int j = 1; j <= 3; ++j)
        rhs_div = rhs_div - (psi[j] * pot[j] + scaled(psi[j], g.mean_phi1[j]));
    rhs_div = scaled(rhs_div, cplx(0.0, 1.0));
    rep.divergence = rel_l2_error(lhs_div, rhs_div);
    return rep;
}

// ---- elliptic formula -----------------------------------------------------------------

/// chi~_nu = mean(psi_nu)
///         + i sum_i d_i Lap^{-1}( psi_nu Lap^{-1} d_j B_{ij} - psi_i Lap^{-1} d_j B_{nu j} )
///         + i Lap^{-1} sum_i d_i ( m_i psi_nu - m_nu psi_i )
/// Agreement with DynSep.chi is conditional on the twisted div-curl system.
inline std::array<ScalarField3, 4> elliptic_formula(const std::array<ScalarField3, 4>& psi,
                                                    const std::array<cplx, 4>& mean_phi1) {
    std::array<ScalarField3, 4> pot;
    for (int a = 0; a < 4; ++a) pot[a] = detail::bracket_potential(psi, a);

    std::array<ScalarField3, 4> chi_t;
    for (int nu = 0; nu < 4; ++nu) {
        ScalarField3 acc(psi[nu].grid);
        for (int i = 1; i <= 3; ++i) {
            ScalarField3 inner = psi[nu] * pot[i] - psi[i] * pot[nu];
            inner = inner + scaled(psi[nu], mean_phi1[i]) - scaled(psi[i], mean_phi1[nu]);
            acc = acc + inv_lap_partial(inner, i); // d_i Lap^{-1} commutes with Lap^{-1} d_i
        }
        chi_t[nu] = scaled(acc, cplx(0.0, 1.0));
        const cplx m = mean(psi[nu]);
        for (auto& v : chi_t[nu].data) v += m;
    }
    return chi_t;
}

// ---- gauge-change diagnostic ------------------------------------------------------------

enum class GaugeFn { exp_i, sine, cosine };

inline cplx apply_gauge_fn(GaugeFn f, double u) {
    switch (f) {
        case GaugeFn::exp_i: return std::polar(1.0, u);
        case GaugeFn::sine: return cplx(std::sin(u), 0.0);
        case GaugeFn::cosine: return cplx(std::cos(u), 0.0);
    }
    return cplx(0.0);
}

struct GaugeChangeRow {
    int k = 0;
    double c_k = 0.0;
    double norm_in = 0.0;  // diag norm of P_k psi
    double norm_out = 0.0; // diag norm of P_k(f(arg) psi)
    double ratio = 0.0;    // norm_out / c_k
};

struct GaugeChangeTable {
    std::string header =
        "S[k] diagnostic subset: energy + X + Strichartz; atomic PW/NFA pieces omitted "
        "(estimator-only, see norms module)";
    std::vector<GaugeChangeRow> rows;
    double max_ratio = 0.0;
};

/// Per-k table of ||P_k(f(Lap^{-1} d_j phi_j) psi)||_diag / c_k, where c_k is
/// the envelope of the same diagnostic norm of psi itself.
inline GaugeChangeTable gauge_change_diagnostic(const std::array<SpacetimeField, 3>& phi_spatial,
                                                const SpacetimeField& psi, GaugeFn f_choice,
                                                double sigma, double mu = kDefaultMu) {
    // arg = Lap^{-1} sum_j d_j phi_j, slice by slice
    SpacetimeField arg = inv_lap_partial(phi_spatial[0], 1) + inv_lap_partial(phi_spatial[1], 2) +
                         inv_lap_partial(phi_spatial[2], 3);
    SpacetimeField out = psi;
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = apply_gauge_fn(f_choice, arg.data[i].real()) * psi.data[i];
    out.tapered = psi.tapered;

    const int k_lo = psi.grid.k_min(), k_hi = psi.grid.k_max();
    std::vector<double> bands;
    for (int k = k_lo; k <= k_hi; ++k) bands.push_back(sk_diag_subset(psi, k, mu));
    const FrequencyEnvelope env = envelope_from_bands(bands, k_lo, sigma);

    GaugeChangeTable table;
    for (int k = k_lo; k <= k_hi; ++k) {
        GaugeChangeRow row;
        row.k = k;
        row.c_k = env.c(k);
        row.norm_in = env.b(k);
        row.norm_out = sk_diag_subset(out, k, mu);
        row.ratio = row.c_k > 0.0 ? row.norm_out / row.c_k : 0.0;
        table.max_ratio = std::max(table.max_ratio, row.ratio);
        table.rows.push_back(row);
    }
    return table;
}

} // namespace wmh2
