#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wmh2/multipliers.hpp"

namespace wmh2 {

struct Vec3 {
    double x = 0, y = 0, z = 0;
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        const double n = norm();
        return {x / n, y / n, z / n};
    }
};

/// angle between unit vectors, stable near 0 and pi
inline double angle_between(const Vec3& u, const Vec3& v) {
    return std::atan2(u.cross(v).norm(), u.dot(v));
}

/// Angular cap on S^2.
struct Cap {
    Vec3 center;   // unit
    double radius; // angular radius r

    bool contains(const Vec3& dir) const { return angle_between(center, dir) <= radius; }
    bool half_contains(const Vec3& dir) const { return angle_between(center, dir) <= 0.5 * radius; }
    bool in_double(const Vec3& dir) const { return angle_between(center, dir) <= 2.0 * radius; }
    double area() const { return 2.0 * kPi * (1.0 - std::cos(radius)); }
};

/// dist(omega, kappa): angular distance from a direction to the cap set.
inline double dist_to_cap(const Vec3& omega, const Cap& c) {
    return std::max(0.0, angle_between(omega, c.center) - c.radius);
}
/// separation of two caps (0 if they touch)
inline double cap_distance(const Cap& a, const Cap& b) {
    return std::max(0.0, angle_between(a.center, b.center) - a.radius - b.radius);
}

/// Finitely-overlapping cover of S^2 by caps of radius ~2^{-l}, built by
/// recursive icosahedron subdivision. Cap radius is 2.2x the largest face
/// circumradius at that depth, so the concentric half-radius caps still
/// cover the sphere with margin.
struct CapCover {
    int level = 0;
    std::vector<Cap> caps;

    // smooth angular bump of cap i at direction dir, before normalization:
    // chi(4*dist/r): == 1 inside radius r/4, support strictly inside r/2.
    double raw_weight(std::size_t i, const Vec3& dir) const {
        const Cap& c = caps[i];
        const double d = angle_between(c.center, dir);
        if (d >= 0.5 * c.radius) return 0.0;
        return chi_cutoff(4.0 * d / c.radius);
    }

    double weight_sum(const Vec3& dir) const {
        double s = 0.0;
        for (std::size_t i = 0; i < caps.size(); ++i) s += raw_weight(i, dir);
        return s;
    }

    /// a_kappa(dir): normalized partition member, sum_kappa a_kappa == 1.
    double a(std::size_t i, const Vec3& dir) const {
        const double w = raw_weight(i, dir);
        if (w == 0.0) return 0.0;
        return w / weight_sum(dir);
    }

    int overlap_count(const Vec3& dir) const {
        int c = 0;
        for (const auto& cap : caps)
            if (cap.contains(dir)) ++c;
        return c;
    }
};

/// Bound the construction guarantees on the cap overlap count.
inline constexpr int kCapOverlapBound = 24;
inline constexpr int kCapCoverMaxLevel = 6;

namespace detail {

struct TriMesh {
    std::vector<Vec3> verts;
    std::vector<std::array<std::uint32_t, 3>> faces;
};

inline TriMesh icosahedron() {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    TriMesh m;
    const double raw[12][3] = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                               {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                               {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    for (auto& v : raw) m.verts.push_back(Vec3{v[0], v[1], v[2]}.normalized());
    const std::uint32_t f[20][3] = {{0, 11, 5}, {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                    {1, 5, 9},  {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                    {3, 9, 4},  {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                    {4, 9, 5},  {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (auto& x : f) m.faces.push_back({x[0], x[1], x[2]});
    return m;
}

inline TriMesh subdivide(const TriMesh& in) {
    TriMesh out;
    out.verts = in.verts;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
    auto mid = [&](std::uint32_t a, std::uint32_t b) {
        auto key = std::minmax(a, b);
        auto it = midpoints.find(key);
        if (it != midpoints.end()) return it->second;
        Vec3 m = (out.verts[a] + out.verts[b]).normalized();
        out.verts.push_back(m);
        std::uint32_t id = std::uint32_t(out.verts.size() - 1);
        midpoints.emplace(key, id);
        return id;
    };
    for (auto& f : in.faces) {
        const std::uint32_t a = f[0], b = f[1], c = f[2];
        const std::uint32_t ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
        out.faces.push_back({a, ab, ca});
        out.faces.push_back({b, bc, ab});
        out.faces.push_back({c, ca, bc});
        out.faces.push_back({ab, bc, ca});
    }
    return out;
}

} // namespace detail

/// Deterministic cover K_l by 20*4^l caps.
inline CapCover cap_cover(int l) {
    if (l < 0 || l > kCapCoverMaxLevel)
        throw std::out_of_range("cap_cover: l must be in [0, " +
                                std::to_string(kCapCoverMaxLevel) + "], got " + std::to_string(l));
    detail::TriMesh mesh = detail::icosahedron();
    for (int d = 0; d < l; ++d) mesh = detail::subdivide(mesh);

    // max spherical circumradius over faces = covering radius of the centers
    double max_circum = 0.0;
    std::vector<Vec3> centers;
    centers.reserve(mesh.faces.size());
    for (auto& f : mesh.faces) {
        const Vec3 c = (mesh.verts[f[0]] + mesh.verts[f[1]] + mesh.verts[f[2]]).normalized();
        centers.push_back(c);
        for (int v = 0; v < 3; ++v)
            max_circum = std::max(max_circum, angle_between(c, mesh.verts[f[v]]));
    }
    CapCover cover;
    cover.level = l;
    const double radius = 2.2 * max_circum;
    for (auto& c : centers) cover.caps.push_back({c, radius});
    return cover;
}

inline int feasible_l_max(const GridSpec& g) { return g.l_max(); }

/// Per-grid-point angular weights of one cap (a_kappa at each xi direction),
/// with the cover normalization folded in. flip evaluates a_kappa(-xi/|xi|).
inline std::vector<double> cap_symbol_on_grid(const GridSpec& g, const CapCover& cover,
                                              std::size_t cap_index, bool flip) {
    std::vector<double> w(g.spatial_size(), 0.0);
    const std::uint32_t n = g.n;
    std::size_t p = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        const double x1 = g.xi(i);
        for (std::uint32_t j = 0; j < n; ++j) {
            const double x2 = g.xi(j);
            for (std::uint32_t k = 0; k < n; ++k, ++p) {
                const double x3 = g.xi(k);
                const double a = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
                if (a == 0.0) continue;
                Vec3 dir{x1 / a, x2 / a, x3 / a};
                if (flip) dir = dir * -1.0;
                w[p] = cover.a(cap_index, dir);
            }
        }
    }
    return w;
}

namespace detail {

template <class F>
void scale_coefficients_spatial(F& f, const std::vector<double>& w) {
    // multiply transformed coefficients of every time slice by a spatial weight
    const std::size_t ns = f.grid.spatial_size();
    const std::size_t slices = f.data.size() / ns;
    for (std::size_t t = 0; t < slices; ++t)
        for (std::size_t p = 0; p < ns; ++p) f.data[t * ns + p] *= w[p];
}

} // namespace detail

/// P~_{k,kappa}: symbol m~_k(|xi|) a_kappa(xi/|xi|), optional tau half-space.
inline ScalarField3 cap_project(const ScalarField3& f, int k, const CapCover& cover,
                                std::size_t cap_index, bool flip = false) {
    ScalarField3 out = f;
    fft::forward(out);
    auto w = cap_symbol_on_grid(f.grid, cover, cap_index, flip);
    detail::scale_coefficients_spatial(out, w);
    detail::apply_block(out.grid, out.data.data(),
                        [k](double, double, double, double a) {
                            return cplx(lp_bump_wide(a, k), 0.0);
                        },
                        false);
    fft::inverse(out);
    return out;
}

inline SpacetimeField cap_project(const SpacetimeField& f, int k, const CapCover& cover,
                                  std::size_t cap_index, Half h = Half::both, bool flip = false) {
    SpacetimeField out = f;
    fft::forward4(out);
    auto w = cap_symbol_on_grid(f.grid, cover, cap_index, flip);
    const std::size_t ns = out.grid.spatial_size();
    for (std::uint32_t mt = 0; mt < out.grid.t_samples; ++mt) {
        const double hw = half_indicator(out.grid.tau(mt), h);
        cplx* block = out.data.data() + std::size_t(mt) * ns;
        for (std::size_t p = 0; p < ns; ++p) block[p] *= hw * w[p];
        detail::apply_block(out.grid, block,
                            [k](double, double, double, double a) {
                                return cplx(lp_bump_wide(a, k), 0.0);
                            },
                            false);
    }
    fft::inverse4(out);
    return out;
}

/// Deterministic Fibonacci-sphere directions.
inline std::vector<Vec3> fibonacci_sphere(int count) {
    std::vector<Vec3> pts;
    pts.reserve(count);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double th = golden * i;
        pts.push_back({r * std::cos(th), r * std::sin(th), z});
    }
    return pts;
}

/// Deterministic directions strictly inside a cap (center + rings).
inline std::vector<Vec3> cap_interior_samples(const Cap& c, int count) {
    std::vector<Vec3> pts;
    pts.push_back(c.center);
    if (count <= 1) return pts;
    // local frame
    Vec3 up = std::abs(c.center.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    Vec3 e1 = c.center.cross(up).normalized();
    Vec3 e2 = c.center.cross(e1).normalized();
    int rings = 2, placed = 1;
    for (int r = 1; r <= rings && placed < count; ++r) {
        const double rho = c.radius * 0.8 * r / (rings + 0.0);
        const int naz = std::min(count - placed, 4 * r);
        for (int a = 0; a < naz; ++a, ++placed) {
            const double th = 2.0 * kPi * a / naz;
            Vec3 d = (c.center * std::cos(rho)) +
                     ((e1 * std::cos(th) + e2 * std::sin(th)) * std::sin(rho));
            pts.push_back(d.normalized());
        }
    }
    return pts;
}

} // namespace wmh2
