#pragma once

#include <array>
#include <limits>
#include <string>
#include <utility>

#include "wmh2/null_frame.hpp"

namespace wmh2 {

// ---- frequency envelopes ------------------------------------------------------

/// c_a = (sum_k 2^{-sigma|a-k|} b_k^2)^{1/2} over the resolvable band, with
/// b_k the per-band norms. Satisfies c_k 2^{-sigma|a-k|} <= c_a <= 2^{sigma|a-k|} c_k.
struct FrequencyEnvelope {
    double sigma = 0.1;
    int k_lo = 0, k_hi = 0;
    std::vector<double> band;   // b_k
    std::vector<double> values; // c_a

    double c(int a) const { return values[std::size_t(a - k_lo)]; }
    double b(int a) const { return band[std::size_t(a - k_lo)]; }
    int size() const { return int(values.size()); }

    bool two_sided_bound_holds(double tol = 1e-12) const {
        for (int a = k_lo; a <= k_hi; ++a)
            for (int k = k_lo; k <= k_hi; ++k) {
                const double w = std::pow(2.0, -sigma * std::abs(a - k));
                if (c(k) * w > c(a) * (1.0 + tol)) return false;
                if (c(a) > c(k) / w * (1.0 + tol)) return false;
            }
        return true;
    }

    double sum_sq() const {
        double s = 0.0;
        for (double v : values) s += v * v;
        return s;
    }
};

inline FrequencyEnvelope envelope_from_bands(const std::vector<double>& b, int k_lo, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("envelope: sigma must be > 0");
    FrequencyEnvelope e;
    e.sigma = sigma;
    e.k_lo = k_lo;
    e.k_hi = k_lo + int(b.size()) - 1;
    e.band = b;
    e.values.resize(b.size());
    for (std::size_t a = 0; a < b.size(); ++a) {
        double s = 0.0;
        for (std::size_t k = 0; k < b.size(); ++k)
            s += std::pow(2.0, -sigma * std::abs(double(a) - double(k))) * b[k] * b[k];
        e.values[a] = std::sqrt(s);
    }
    return e;
}

/// Envelope of the Hdot^{1/2} band norms of a spatial field. Bands outside
/// the resolvable range are treated as zero (truncation is inherent).
inline FrequencyEnvelope frequency_envelope(const ScalarField3& f, double sigma) {
    const int k_lo = f.grid.k_min(), k_hi = f.grid.k_max();
    std::vector<double> b;
    for (int k = k_lo; k <= k_hi; ++k) b.push_back(hs_norm(lp_project(f, k), 0.5));
    return envelope_from_bands(b, k_lo, sigma);
}

/// Multi-component envelope (e.g. all 8 frame fields): bands add in squares.
inline FrequencyEnvelope frequency_envelope(const std::vector<const ScalarField3*>& fs,
                                            double sigma) {
    if (fs.empty()) throw std::invalid_argument("frequency_envelope: no fields");
    const GridSpec& g = fs.front()->grid;
    const int k_lo = g.k_min(), k_hi = g.k_max();
    std::vector<double> b(std::size_t(k_hi - k_lo + 1), 0.0);
    for (const auto* f : fs)
        for (int k = k_lo; k <= k_hi; ++k) {
            const double v = hs_norm(lp_project(*f, k), 0.5);
            b[std::size_t(k - k_lo)] += v * v;
        }
    for (auto& v : b) v = std::sqrt(v);
    return envelope_from_bands(b, k_lo, sigma);
}

// ---- mixed Lebesgue norms -------------------------------------------------------

/// ||f||_{L^p_t L^q_x} by quadrature; p or q = inf uses max.
inline double mixed_norm(const SpacetimeField& f, double p, double q) {
    const std::size_t ns = f.grid.spatial_size();
    const double dvol = f.grid.cell_volume();
    std::vector<double> per_t(f.grid.t_samples, 0.0);
    for (std::uint32_t t = 0; t < f.grid.t_samples; ++t) {
        const cplx* slice = f.data.data() + std::size_t(t) * ns;
        double v;
        if (std::isinf(q)) {
            v = 0.0;
            for (std::size_t i = 0; i < ns; ++i) v = std::max(v, std::abs(slice[i]));
        } else {
            double s = 0.0;
            for (std::size_t i = 0; i < ns; ++i) s += std::pow(std::abs(slice[i]), q);
            v = std::pow(s * dvol, 1.0 / q);
        }
        per_t[t] = v;
    }
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : per_t) m = std::max(m, v);
        return m;
    }
    double s = 0.0;
    for (double v : per_t) s += std::pow(v, p);
    return std::pow(s * f.grid.dt, 1.0 / p);
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultMu = 0.01;

/// Representative admissible Strichartz pairs used for the sup.
inline const std::vector<std::pair<double, double>>& strichartz_pairs() {
    static const std::vector<std::pair<double, double>> pairs = {
        {kInf, 2.0}, {4.0, 4.0}, {6.0, 3.0}, {3.0, 6.0}};
    return pairs;
}

/// 2^{k(1/p+3/q-1)} ||f||_{L^p_t L^q_x}, with the admissibility contract
/// 1/p + 1/q <= 1/2, p > 2 + mu.
inline double strichartz_component(const SpacetimeField& f, int k, double p, double q,
                                   double mu = kDefaultMu) {
    const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
    const double iq = std::isinf(q) ? 0.0 : 1.0 / q;
    if (ip + iq > 0.5 + 1e-12 || !(p > 2.0 + mu))
        throw std::invalid_argument(
            "strichartz_component: inadmissible (p,q): need 1/p+1/q <= 1/2 and p > 2+mu");
    const double weight = std::pow(2.0, k * (ip + 3.0 * iq - 1.0));
    return weight * mixed_norm(f, p, q);
}

inline double strichartz_sup(const SpacetimeField& f, int k, double mu = kDefaultMu) {
    double best = 0.0;
    for (auto [p, q] : strichartz_pairs()) best = std::max(best, strichartz_component(f, k, p, q, mu));
    return best;
}

// ---- modulation-binned norms ------------------------------------------------------

struct JRange {
    int lo = 0, hi = 0;
    bool truncated = true; // a finite lattice always truncates the j-sum
};

inline JRange resolvable_j_range(const GridSpec& g) {
    const double mu_min = 2.0 * kPi / g.time_window();
    const double tau_max = kPi / g.dt;
    const double xi_max = std::sqrt(3.0) * kPi * g.n / g.length;
    JRange r;
    r.lo = int(std::floor(std::log2(mu_min))) - 1;
    r.hi = int(std::ceil(std::log2(tau_max + xi_max))) + 1;
    return r;
}

/// Xdot_k^{s,b,q} component: 2^{sk} (sum_j or sup_j) 2^{jb} ||Q_j f||_{L2 L2}
/// over the resolvable j range.
inline double xsb_component(const SpacetimeField& f, int k, double s, double b, bool q_sum) {
    require_modulation_ready(f, "xsb_component");
    const JRange jr = resolvable_j_range(f.grid);
    double acc = 0.0;
    for (int j = jr.lo; j <= jr.hi; ++j) {
        const double nj = l2_norm(modulation_project(f, j));
        const double term = std::pow(2.0, b * j) * nj;
        acc = q_sum ? acc + term : std::max(acc, term);
    }
    return std::pow(2.0, s * k) * acc;
}

/// LHS/(2^{min(0,j-k)/4} 2^{3k/2} RHS) of the improved Bernstein inequality.
inline double improved_bernstein_ratio(const SpacetimeField& f, int k, int j) {
    const SpacetimeField piece = modulation_project(lp_project(f, k), j);
    const double lhs = mixed_norm(piece, 2.0, kInf);
    const double rhs = mixed_norm(piece, 2.0, 2.0);
    if (rhs == 0.0) return 0.0;
    const double gain = std::pow(2.0, 0.25 * std::min(0, j - k)) * std::pow(2.0, 1.5 * k);
    return lhs / (gain * rhs);
}

// ---- null-frame atomic-norm estimators -----------------------------------------------

enum class BoundDir { exact, upper, lower, indicative };

inline const char* to_string(BoundDir d) {
    switch (d) {
        case BoundDir::exact: return "exact";
        case BoundDir::upper: return "upper";
        case BoundDir::lower: return "lower";
        case BoundDir::indicative: return "indicative";
    }
    return "?";
}

/// sup_{omega not in 2 kappa} dist(omega,kappa) ||f||_{L^inf_{t_w} L^2_{x_w}},
/// sampled over a deterministic direction set: a LOWER bound for the sup.
inline double nfa_star_estimate(const SpacetimeField& f, const Cap& cap,
                                const std::vector<Vec3>& omegas) {
    double best = 0.0;
    for (const auto& w : omegas) {
        if (cap.in_double(w)) continue;
        const double d = dist_to_cap(w, cap);
        if (d <= 0.0) continue;
        best = std::max(best, d * linf_t_l2_x(null_frame_transform(f, w)));
    }
    return best;
}

/// min over sampled omega in kappa of ||f||_{L^2_{t_w} L^inf_{x_w}}: exhibiting
/// one atom, hence an UPPER bound on the atomic PW norm.
inline double pw_estimate(const SpacetimeField& f, const Cap& cap, int sample_count) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& w : cap_interior_samples(cap, sample_count))
        best = std::min(best, l2_t_linf_x(null_frame_transform(f, w)));
    return std::isinf(best) ? 0.0 : best;
}

// ---- reports ---------------------------------------------------------------------------

struct NormComponent {
    std::string name;
    int k = 0;
    double value = 0.0;
    BoundDir dir = BoundDir::exact;
    bool truncated = false;
    std::string note;
};

struct NormReport {
    std::vector<NormComponent> components;
    void add(std::string name, int k, double v, BoundDir d, bool trunc = false,
             std::string note = "") {
        components.push_back({std::move(name), k, v, d, trunc, std::move(note)});
    }
    const NormComponent* find(const std::string& name) const {
        for (const auto& c : components)
            if (c.name == name) return &c;
        return nullptr;
    }
};

// 4-point central differences (wrap if periodic, clamped stencil otherwise)
inline SpacetimeField fd_time_derivative(const SpacetimeField& f) {
    if (f.grid.time_periodic) return time_derivative(f);
    const std::uint32_t T = f.grid.t_samples;
    if (T < 5) throw std::invalid_argument("fd_time_derivative: need >= 5 slices");
    SpacetimeField out(f.grid);
    out.tapered = f.tapered;
    const std::size_t ns = f.grid.spatial_size();
    for (std::uint32_t t = 0; t < T; ++t) {
        // use centered interior stencil, shifted near the ends
        std::int64_t c = std::min<std::int64_t>(std::max<std::int64_t>(t, 2), T - 3);
        const double off = double(std::int64_t(t) - c);
        // 5-point derivative weights at offset `off` from the stencil center:
        // derivative of the Lagrange basis on nodes {-2,...,2} evaluated at off
        double w[5];
        auto dl = [&](int node) {
            // derivative of prod_{m != node} (x - m)/(node - m) at x = off
            double sum = 0.0;
            for (int m = -2; m <= 2; ++m) {
                if (m == node) continue;
                double prod = 1.0;
                for (int r = -2; r <= 2; ++r) {
                    if (r == node || r == m) continue;
                    prod *= (off - r);
                }
                sum += prod;
            }
            double den = 1.0;
            for (int m = -2; m <= 2; ++m)
                if (m != node) den *= (node - m);
            return sum / den;
        };
        for (int a = -2; a <= 2; ++a) w[a + 2] = dl(a);
        for (std::size_t i = 0; i < ns; ++i) {
            cplx acc(0.0);
            for (int a = -2; a <= 2; ++a)
                acc += w[a + 2] * f.data[std::size_t(c + a) * ns + i];
            out.data[std::size_t(t) * ns + i] = acc / f.grid.dt;
        }
    }
    return out;
}

/// ||grad_{x,t} f||_{L^inf_t Hdot^{-1/2}}: RSS over the four gradient components
/// per slice, sup over slices. Zero spatial modes are dropped (flagged upstream).
inline double sk_energy_component(const SpacetimeField& f) {
    const SpacetimeField ft = fd_time_derivative(f);
    std::array<SpacetimeField, 4> grad = {ft, partial(f, 1), partial(f, 2), partial(f, 3)};
    double best = 0.0;
    for (std::uint32_t t = 0; t < f.grid.t_samples; ++t) {
        double s = 0.0;
        for (const auto& gcomp : grad) {
            const double v = hs_norm(gcomp.slice(t), -0.5);
            s += v * v;
        }
        best = std::max(best, std::sqrt(s));
    }
    return best;
}

inline double sk_x_component(const SpacetimeField& f, int k) {
    const SpacetimeField ft = fd_time_derivative(f);
    std::array<const SpacetimeField*, 4> grad = {&ft, nullptr, nullptr, nullptr};
    SpacetimeField g1 = partial(f, 1), g2 = partial(f, 2), g3 = partial(f, 3);
    grad[1] = &g1; grad[2] = &g2; grad[3] = &g3;
    const JRange jr = resolvable_j_range(f.grid);
    double best = 0.0;
    for (int j = jr.lo; j <= jr.hi; ++j) {
        double s = 0.0;
        for (const auto* gc : grad) {
            const double v = l2_norm(modulation_project(*gc, j));
            s += v * v;
        }
        best = std::max(best, std::pow(2.0, 0.5 * j) * std::sqrt(s));
    }
    return std::pow(2.0, -0.5 * k) * best;
}

struct SkOptions {
    double mu = kDefaultMu;
    int omega_count = 64;     // global Fibonacci directions for NFA*
    int nfa_per_cap = 3;      // directions actually resampled per cap piece
    int pw_samples = 3;       // per-cap interior samples for PW
    int max_l = 0;            // cap-sum levels actually evaluated
    bool with_cap_norms = true;
};

/// first `count` global directions outside 2 kappa (deterministic subset)
inline std::vector<Vec3> nfa_directions(const std::vector<Vec3>& omegas, const Cap& cap,
                                        int count) {
    std::vector<Vec3> out;
    for (const auto& w : omegas) {
        if (int(out.size()) >= count) break;
        if (!cap.in_double(w)) out.push_back(w);
    }
    return out;
}

/// S[k, kappa] component set for a (cap-localized) piece.
inline NormReport s_k_cap_norm(const SpacetimeField& f, int k, const Cap& cap,
                               const SkOptions& opt = {}) {
    NormReport rep;
    const std::vector<Vec3> omegas =
        nfa_directions(fibonacci_sphere(opt.omega_count), cap, opt.nfa_per_cap);
    const double wk = std::pow(2.0, 0.5 * k);
    rep.add("nfa_star", k, wk * nfa_star_estimate(f, cap, omegas), BoundDir::lower, true,
            "finite omega sampling of a sup");
    rep.add("pw", k, std::pow(cap.area(), -0.5) / wk * pw_estimate(f, cap, opt.pw_samples),
            BoundDir::upper, false, "single-atom bound");
    rep.add("energy_linf_l2", k, wk * mixed_norm(f, kInf, 2.0), BoundDir::exact);
    rep.add("strichartz_sup", k, strichartz_sup(f, k, opt.mu), BoundDir::exact);
    return rep;
}

/// single indicative scalar for ratios
inline double s_k_cap_norm_scalar(const SpacetimeField& f, int k, const Cap& cap,
                                  const SkOptions& opt = {}) {
    double s = 0.0;
    for (const auto& c : s_k_cap_norm(f, k, cap, opt).components) s += c.value;
    return s;
}

/// Component-wise S[k] diagnostic: exact pieces (energy, X, Strichartz) plus
/// cap-sum estimator pieces over the feasible l range. Mixed bound directions
/// are never combined into one number.
inline NormReport s_k_diagnostic(const SpacetimeField& f, int k, const SkOptions& opt = {}) {
    require_modulation_ready(f, "s_k_diagnostic");
    NormReport rep;
    const SpacetimeField fk = lp_project(f, k);
    rep.add("energy", k, sk_energy_component(fk), BoundDir::exact);
    rep.add("xsb", k, sk_x_component(fk, k), BoundDir::exact, true, "resolvable j range");
    rep.add("strichartz_sup", k, strichartz_sup(fk, k, opt.mu), BoundDir::exact);

    if (!opt.with_cap_norms) return rep;
    const int l_hi = std::min(opt.max_l, feasible_l_max(f.grid));
    const std::vector<Vec3> omegas = fibonacci_sphere(opt.omega_count);

    double cap_exact = 0.0, cap_lower = 0.0, cap_upper = 0.0;
    for (int l = 0; l <= l_hi; ++l) {
        const CapCover cover = cap_cover(l);
        for (int sign = 0; sign < 2; ++sign) {
            const Half h = sign == 0 ? Half::plus : Half::minus;
            double s_exact = 0.0, s_lower = 0.0, s_upper = 0.0;
            for (std::size_t ci = 0; ci < cover.caps.size(); ++ci) {
                SpacetimeField piece =
                    cap_project(modulation_below(f, k - 2 * l, h), k, cover, ci, h, sign == 1);
                const double wk = std::pow(2.0, 0.5 * k);
                const double e = wk * mixed_norm(piece, kInf, 2.0) + strichartz_sup(piece, k, opt.mu);
                s_exact += e * e;
                const double lo =
                    wk * nfa_star_estimate(
                             piece, cover.caps[ci],
                             nfa_directions(omegas, cover.caps[ci], opt.nfa_per_cap));
                s_lower += lo * lo;
                const double up = std::pow(cover.caps[ci].area(), -0.5) / wk *
                                  pw_estimate(piece, cover.caps[ci], opt.pw_samples);
                s_upper += up * up;
            }
            cap_exact = std::max(cap_exact, std::sqrt(s_exact));
            cap_lower = std::max(cap_lower, std::sqrt(s_lower));
            cap_upper = std::max(cap_upper, std::sqrt(s_upper));
        }
    }
    rep.add("cap_sum_exact", k, cap_exact, BoundDir::exact, true,
            "l <= " + std::to_string(l_hi) + " (paper sup over l > 10 not resolvable)");
    rep.add("cap_sum_nfa_star", k, cap_lower, BoundDir::lower, true, "sampled sup");
    rep.add("cap_sum_pw", k, cap_upper, BoundDir::upper, true, "single-atom bound");
    return rep;
}

/// Exact-component diagnostic subset (energy + X + Strichartz), the norm used
/// by the gauge-change diagnostic; PW/NFA atomic pieces deliberately omitted.
inline double sk_diag_subset(const SpacetimeField& f, int k, double mu = kDefaultMu) {
    const SpacetimeField fk = lp_project(f, k);
    return sk_energy_component(fk) + sk_x_component(fk, k) + strichartz_sup(fk, k, mu);
}

// ---- N[k] upper bound ---------------------------------------------------------------

/// min over the two explicit atomic decompositions (type-1 L1L2 atom; type-2
/// modulation-binned L2L2 atoms). Lattice samples on the exact cone go to the
/// lowest resolvable bin; type-3 atoms are not used. Upper bound.
inline double n_k_upper(const SpacetimeField& F, int k) {
    require_modulation_ready(F, "n_k_upper");
    const double type1 = std::pow(2.0, -0.5 * k) * mixed_norm(F, 1.0, 2.0);
    const JRange jr = resolvable_j_range(F.grid);
    double type2 = 0.0;
    SpacetimeField covered(F.grid);
    covered.tapered = F.tapered;
    for (int j = jr.lo; j <= jr.hi; ++j) {
        const SpacetimeField qj = modulation_project(F, j);
        type2 += std::pow(2.0, -0.5 * j - 0.5 * k) * l2_norm(qj);
        covered = covered + qj;
    }
    const SpacetimeField rest = F - covered; // cone samples + below-range modulation
    type2 += std::pow(2.0, -0.5 * jr.lo - 0.5 * k) * l2_norm(rest);
    return std::min(type1, type2);
}

// ---- bilinear cap inequality -----------------------------------------------------------

struct CruxResult {
    double lhs = 0.0;
    double prefactor = 0.0;
    double s_left = 0.0, s_right = 0.0;
    double ratio = 0.0;
    BoundDir dir = BoundDir::indicative;
};

/// ||phi psi||_{L2L2} / (prefactor * S[k,kappa](phi) S[k',kappa'](psi)); the
/// S values mix estimator directions, so the ratio is tagged indicative.
inline CruxResult crux_ratio(const SpacetimeField& phi, const SpacetimeField& psi, int k, int kp,
                             const Cap& cap, const Cap& capp, const SkOptions& opt = {}) {
    const double d = cap_distance(cap, capp);
    if (d < std::max(cap.radius, capp.radius))
        throw std::invalid_argument("crux_ratio: caps must be separated by at least their radius");
    CruxResult r;
    r.lhs = mixed_norm(phi * psi, 2.0, 2.0);
    r.prefactor = std::pow(2.0, 0.5 * kp) * std::sqrt(capp.area()) /
                  (d * std::pow(2.0, 0.5 * k));
    r.s_left = s_k_cap_norm_scalar(phi, k, cap, opt);
    r.s_right = s_k_cap_norm_scalar(psi, kp, capp, opt);
    const double den = r.prefactor * r.s_left * r.s_right;
    r.ratio = den > 0.0 ? r.lhs / den : 0.0;
    return r;
}

} // namespace wmh2
