#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sphcone/families.hpp"
#include "sphcone/quad_diff.hpp"

using namespace sphcone;

namespace {

struct Ex1Roots {
    cplx plus, minus;
};

// z^2 - (b - 2) z + (b + 1) = 0
Ex1Roots ex1_roots(double b) {
    const cplx disc = std::sqrt(cplx(b * (b - 8)));
    return {0.5 * ((b - 2) + disc), 0.5 * ((b - 2) - disc)};
}

// Res at z+ of sigma/df with sigma = dz^2 / (z (z - z+)(z - z-)) and
// f' = (z - z+)(z - z-) / (2 sqrt z (z + 1)^2):  sigma/f' = g(z)/(z - z+)^2,
// g = 2 z^{-1/2} (z + 1)^2 (z - z-)^{-2}, residue g'(z+).
cplx ex1_residue_oracle(double b) {
    const auto [zp, zm] = ex1_roots(b);
    const cplx g = 2.0 / std::sqrt(zp) * (zp + 1.0) * (zp + 1.0) / ((zp - zm) * (zp - zm));
    return g * (-0.5 / zp + 2.0 / (zp + 1.0) - 2.0 / (zp - zm));
}

// closed form of the same residue
cplx ex1_residue_closed(double b) {
    const auto [zp, zm] = ex1_roots(b);
    return -(zp + 1.0) * (zp + 1.0) * (b + 4) / (std::pow(zp, 1.5) * std::pow(zp - zm, 3));
}

}  // namespace

TEST_CASE("basis dimension and pole orders") {
    std::vector<cplx> pts{0.0, 1.0, {0.0, 2.0}};
    auto b = qd_basis(pts, true);
    REQUIRE(b.size() == 1);
    CHECK(b[0].pole_order_at_infinity() == 1);
    auto c = qd_basis(std::vector<cplx>{0.0, 1.0, 2.0, 3.0, 4.0}, false);
    REQUIRE(c.size() == 2);
    for (const auto& q : c) CHECK(q.pole_order_at_infinity() <= 0);
    CHECK(qd_basis(std::vector<cplx>{0.0, 1.0}, true).empty());
    CHECK_THROWS_AS(qd_basis(std::vector<cplx>{1.0, 1.0, 2.0, 3.0}, true), Error);
}

TEST_CASE("residue of dz/z") {
    TwistedRational f(ExpPoly::monomial(1.0, {1, 0}));
    QuadDifferential s{{1.0}, {0.0, 1.0}};  // dz^2 / z
    CHECK(std::abs(residue_sigma_over_df(s, f, 0.0, 0.5) - 1.0) < 1e-12);
    QuadDifferential t;  // dz^2: sigma/df = dz has no residue
    CHECK(std::abs(residue_sigma_over_df(t, f, 0.0, 0.5)) < 1e-12);
}

TEST_CASE("residue at a double pole of sigma/df against the derivative formula") {
    for (double b : {4.0, 1.5, -6.0, 12.0}) {
        const auto f = ex1_family(b);
        const auto cones = cone_points(f);
        const auto basis = qd_basis(cones);
        REQUIRE(basis.size() == 1);
        const cplx zp = ex1_roots(b).plus;
        const cplx R = residue_sigma_over_df(basis[0], f, zp, 0.05);
        CHECK(std::abs(R - ex1_residue_oracle(b)) < 1e-10);
        CHECK(std::abs(R - ex1_residue_closed(b)) < 1e-10);
    }
}

TEST_CASE("residues vanish at b = -4 and not at b = 4") {
    const auto f = ex1_family(-4.0);
    const auto cones = cone_points(f);
    const auto basis = qd_basis(cones);
    for (const auto& r : integer_residues(basis[0], f, cones)) CHECK(std::abs(r.residue) < 1e-12);
    // also for (1 - f^2, i(1 + f^2), 2f) sigma/df, the Weierstrass integrand
    const auto g = ex1_family(4.0);
    const auto cg = cone_points(g);
    const auto rg = integer_residues(qd_basis(cg)[0], g, cg);
    REQUIRE(rg.size() == 2);
    for (const auto& r : rg) CHECK(std::abs(r.residue) > 1e-3);
}

TEST_CASE("invalid circles") {
    const auto f = ex1_final_map();
    QuadDifferential s;
    CHECK_THROWS_AS(residue_sigma_over_df(s, f, 0.5, 0.6), Error);
    CHECK_THROWS_AS(residue_sigma_over_df(s, f, 0.5, -1.0), Error);
    const cplx zp = -3 + 2 * std::sqrt(3.0);
    // circle around z+ that also holds the pole at -1 is still legal (simple
    // pole of f is harmless) but one holding 0 is not
    CHECK_THROWS_AS(residue_sigma_over_df(s, f, zp, 0.47), Error);
}

TEST_CASE("omega from sigma matches sigma / f'") {
    const auto f = ex1_final_map();
    QuadDifferential s = qd_basis(cone_points(f))[0];
    const auto w = omega_from_sigma(s, f);
    const auto p = CoverPoint::on_branch({0.3, 0.7}, 1);
    const double h = 1e-6;
    const cplx fp = (f(p.near(p.z + h)) - f(p.near(p.z - h))) / (2 * h);
    CHECK(std::abs(w(p) - s(p.z) / fp) < 1e-7 * std::abs(w(p)));
}

TEST_CASE("scan finds b = -4 on the negative side") {
    ScanOptions opt;
    opt.samples = 121;
    opt.excluded = {0.0, 8.0};
    auto scan = find_admissible(ex1_family, -7.0, -1.0, opt);
    REQUIRE(scan.roots.size() == 1);
    CHECK(std::abs(scan.roots[0] + 4.0) < 1e-8);
    auto pos = find_admissible(ex1_family, 1.0, 7.0, opt);
    CHECK(pos.roots.empty());
}
