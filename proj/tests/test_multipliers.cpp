#include <catch2/catch_amalgamated.hpp>

#include "wmh2/multipliers.hpp"
#include "wmh2/norms.hpp"
#include "wmh2/random_fields.hpp"

using namespace wmh2;

namespace {
GridSpec grid16() { return GridSpec(16, 2.0 * kPi, 16, 2.0 * kPi / 16, true); }
}

TEST_CASE("lp_project on plane waves") {
    const GridSpec g = grid16();
    // |xi| = 2^1 = 2: P_1 leaves it unchanged, m_1(2) = 1
    const SpacetimeField f = plane_wave(g, 0, 2, 0, 0);
    CHECK(rel_l2_error(lp_project(f, 1), f) < 1e-12);
    // |xi| = 2^3 is outside supp m_1 = (1, 4)
    const SpacetimeField h = plane_wave(g, 0, 0, 8, 0);
    CHECK(max_abs(lp_project(h, 1)) < 1e-12);
}

TEST_CASE("lp_project telescoping partition of unity") {
    const GridSpec g = grid16();
    const ScalarField3 f = random_scalar(g, 7, int(g.n) / 8);
    ScalarField3 sum(g);
    for (int k = g.k_min(); k <= g.k_max(); ++k) sum = sum + lp_project(f, k);
    CHECK(rel_l2_error(sum, f) < 1e-12);
}

TEST_CASE("lp_project rejects k outside the resolvable band") {
    const GridSpec g = grid16();
    const ScalarField3 f(g);
    CHECK_THROWS_MATCHES(lp_project(f, g.k_max() + 1), std::out_of_range,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("resolvable band")));
}

TEST_CASE("riesz_spatial on a single mode") {
    const GridSpec g = grid16();
    const ScalarField3 f = plane_wave3(g, 1, 0, 0);
    // symbol i xi_1/|xi| = i at xi = (1,0,0)
    CHECK(rel_l2_error(riesz_spatial(f, 1), scaled(f, cplx(0.0, 1.0))) < 1e-12);

    ScalarField3 c(g);
    for (auto& v : c.data) v = 3.5;
    CHECK(max_abs(riesz_spatial(c, 2)) < 1e-14);
}

TEST_CASE("riesz squares sum to minus identity") {
    const GridSpec g = grid16();
    const ScalarField3 f = random_scalar(g, 11, int(g.n) / 3);
    ScalarField3 acc(g);
    for (int j = 1; j <= 3; ++j) acc = acc + riesz_spatial(riesz_spatial(f, j), j);
    CHECK(rel_l2_error(acc, scaled(f, -1.0)) < 1e-12);
}

TEST_CASE("inv_lap_partial examples") {
    const GridSpec g = grid16();
    const ScalarField3 f = plane_wave3(g, 1, 0, 0);
    CHECK(rel_l2_error(inv_lap_partial(f, 1), scaled(f, cplx(0.0, -1.0))) < 1e-12);

    const ScalarField3 r = random_scalar(g, 13, int(g.n) / 3);
    ScalarField3 acc(g);
    for (int j = 1; j <= 3; ++j) acc = acc + partial(inv_lap_partial(r, j), j);
    CHECK(rel_l2_error(acc, r) < 1e-12);

    ScalarField3 c(g);
    for (auto& v : c.data) v = -2.0;
    CHECK(max_abs(inv_lap_partial(c, 1)) < 1e-14);
}

TEST_CASE("inv_grad examples") {
    const GridSpec g = grid16();
    const ScalarField3 f = plane_wave3(g, 1, 0, 0);
    CHECK(rel_l2_error(inv_grad(f), f) < 1e-12);

    const ScalarField3 r = random_scalar(g, 17, int(g.n) / 3);
    CHECK(rel_l2_error(inv_grad(inv_grad(r)), fractional_power(r, -2.0)) < 1e-12);
}

TEST_CASE("partial of inv_grad equals riesz") {
    const GridSpec g = grid16();
    const ScalarField3 r = random_scalar(g, 19, int(g.n) / 3);
    for (int j = 1; j <= 3; ++j)
        CHECK(rel_l2_error(partial(inv_grad(r), j), riesz_spatial(r, j)) < 1e-12);
}

TEST_CASE("multiplier operators commute") {
    const GridSpec g = grid16();
    const ScalarField3 r = random_scalar(g, 23, int(g.n) / 8);
    CHECK(rel_l2_error(riesz_spatial(lp_project(r, 0), 1), lp_project(riesz_spatial(r, 1), 0)) <
          1e-12);
    CHECK(rel_l2_error(inv_grad(inv_lap_partial(r, 2)), inv_lap_partial(inv_grad(r), 2)) < 1e-12);
}

TEST_CASE("real fields stay real under odd multipliers") {
    const GridSpec g = grid16();
    const ScalarField3 r = random_real_scalar(g, 29, int(g.n) / 3);
    CHECK(max_imag(riesz_spatial(r, 1)) < 1e-12);
    CHECK(max_imag(inv_lap_partial(r, 3)) < 1e-12);
    CHECK(max_imag(inv_grad(r)) < 1e-12);
}

TEST_CASE("parseval") {
    const GridSpec g = grid16();
    const ScalarField3 r = random_scalar(g, 31, int(g.n) / 3, false);
    CHECK(std::abs(l2_norm(r) - l2_norm_coefficients(r)) / l2_norm(r) < 1e-12);
}

TEST_CASE("hdot half of a single cosine mode") {
    const GridSpec g = grid16();
    ScalarField3 f(g);
    for (std::uint32_t i = 0; i < g.n; ++i)
        for (std::uint32_t j = 0; j < g.n; ++j)
            for (std::uint32_t k = 0; k < g.n; ++k) f.at(i, j, k) = std::cos(i * g.dx());
    const double expected = std::pow(2.0 * kPi, 3) / 2.0; // |xi| ||f||_L2^2
    CHECK(hs_norm(f, 0.5) * hs_norm(f, 0.5) == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("modulation projector on null and off-null modes") {
    const GridSpec g = grid16();
    const SpacetimeField on_cone = plane_wave(g, 1, 1, 0, 0); // |tau| = |xi| = 1
    for (int j = -1; j <= 2; ++j) CHECK(max_abs(modulation_project(on_cone, j)) < 1e-12);

    const SpacetimeField off = plane_wave(g, 2, 1, 0, 0); // modulation |2-1| = 1 = 2^0
    CHECK(rel_l2_error(modulation_project(off, 0), off) < 1e-12);

    // Q^+ annihilates waves supported in tau < 0
    const SpacetimeField neg = plane_wave(g, -2, 1, 0, 0);
    CHECK(max_abs(modulation_project(neg, 0, Half::plus)) < 1e-12);
    CHECK(rel_l2_error(modulation_project(neg, 0, Half::minus), neg) < 1e-12);
}

TEST_CASE("modulation operators demand periodic or tapered input") {
    GridSpec g(16, 2.0 * kPi, 16, 0.05, false);
    SpacetimeField f(g);
    CHECK_THROWS_MATCHES(modulation_project(f, 0), std::invalid_argument,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("taper")));
    const SpacetimeField tapered = taper_window(f);
    CHECK_NOTHROW(modulation_project(tapered, 0));
}

TEST_CASE("taper is exactly one on the middle half") {
    CHECK(taper_weight(0.5) == 1.0);
    CHECK(taper_weight(0.3) == 1.0);
    CHECK(taper_weight(0.7) == 1.0);
    CHECK(taper_weight(0.0) == 0.0);
    CHECK(taper_weight(0.999) < 0.05);
}

TEST_CASE("box operator symbol") {
    const GridSpec g = grid16();
    const SpacetimeField null_mode = plane_wave(g, 1, 1, 0, 0);
    CHECK(max_abs(box_operator(null_mode)) < 1e-11);

    const SpacetimeField f = plane_wave(g, 2, 1, 0, 0);
    CHECK(rel_l2_error(box_operator(f), scaled(f, -3.0)) < 1e-12);

    SpacetimeField c(g);
    for (auto& v : c.data) v = 1.0;
    CHECK(max_abs(box_operator(c)) < 1e-12);
}

TEST_CASE("riesz_time spectral and derivative paths agree") {
    const GridSpec g = grid16();
    const SpacetimeField f = plane_wave(g, 1, 1, 0, 0);
    CHECK(rel_l2_error(riesz_time(f), scaled(f, cplx(0.0, 1.0))) < 1e-12);

    // time-independent field maps to zero
    const SpacetimeField s = plane_wave(g, 0, 1, 2, 0);
    CHECK(max_abs(riesz_time(s)) < 1e-12);

    const SpacetimeField r = random_spacetime(g, 37, 4, 4);
    const SpacetimeField dr = time_derivative(r);
    CHECK(rel_l2_error(riesz_time(r), riesz_time(r, &dr)) < 1e-10);

    GridSpec gn(16, 2.0 * kPi, 16, 0.05, false);
    SpacetimeField np(gn);
    CHECK_THROWS_AS(riesz_time(np), std::invalid_argument);
}

TEST_CASE("modulation family partitions the lattice including the cone") {
    const GridSpec g = grid16();
    const SpacetimeField u = random_spacetime(g, 41, 4, 4);
    const JRange jr = resolvable_j_range(g);
    SpacetimeField sum = modulation_below(u, jr.lo + 2);
    for (int j = jr.lo + 2; j <= jr.hi; ++j) sum = sum + modulation_project(u, j);
    CHECK(rel_l2_error(sum, u) < 1e-12);
}
