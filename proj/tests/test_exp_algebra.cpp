#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sphcone/exp_algebra.hpp"
#include "sphcone/json_io.hpp"

using namespace sphcone;

namespace {

ExpPoly mono(double al, int a, int b, cplx c = 1.0) { return ExpPoly::monomial(al, {a, b}, c); }

}  // namespace

TEST_CASE("derivative of z^(1+alpha)") {
    const double al = 0.3;
    ExpPoly p = mono(al, 1, 1);
    ExpPoly d = p.derivative();
    CHECK(d.size() == 1);
    CHECK(d.coefficient({0, 1}) == cplx(1.3));
}

TEST_CASE("derivative agrees with a difference quotient") {
    const double al = 0.37;
    ExpPoly p = mono(al, 2, 1, {1, 2}) + mono(al, -1, 2, {0.5, -1}) + mono(al, 3, -1, 3.0);
    const auto d = p.derivative();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    for (int t = 0; t < 20; ++t) {
        cplx z(U(rng), U(rng));
        if (std::abs(z) < 0.3) continue;
        const auto c = CoverPoint::on_branch(z, t % 3 - 1);
        const double h = 1e-5;
        const cplx fd = (p(c.near(z + h)) - p(c.near(z - h))) / (2 * h);
        CHECK(std::abs(fd - d(c)) < 1e-7 * (1 + std::abs(d(c))));
    }
}

TEST_CASE("w = sqrt(z) on two branches") {
    ExpPoly w = mono(0.5, 0, 1);
    CHECK(std::abs(w(CoverPoint::on_branch(-1.0, 0)) - cplx(0, 1)) < 1e-15);
    CHECK(std::abs(w(CoverPoint::on_branch(-1.0, 1)) - cplx(0, -1)) < 1e-15);
    CHECK_THROWS_AS(evaluate(TwistedRational(w), 0.0, 0), Error);
}

TEST_CASE("monodromy shift equals evaluation on the next sheet") {
    const double al = 0.41;
    TwistedRational r(mono(al, 0, 1, 2.0) + mono(al, 1, 0), mono(al, 2, 0) + mono(al, 0, 0, 3.0));
    const auto p = CoverPoint::on_branch({0.4, -0.9}, 0);
    CHECK(std::abs(r.monodromy_shifted(1)(p) - r(p.turned(1))) < 1e-14);
}

TEST_CASE("normal form divides out the common monomial") {
    const double al = 0.25;
    TwistedRational r(mono(al, 2, 1), mono(al, 1, 3));
    CHECK(r.num() == mono(al, 1, 0));
    CHECK(r.den() == mono(al, 0, 2));
}

TEST_CASE("mismatched alpha is rejected") {
    CHECK_THROWS_AS(mono(0.5, 1, 0) + mono(0.25, 1, 0), Error);
    try {
        (void)(mono(0.5, 1, 0) * mono(0.25, 1, 0));
    } catch (const Error& e) {
        CHECK(e.code() == Errc::alpha_mismatch);
    }
}

TEST_CASE("field operations agree pointwise") {
    const double al = 0.5;
    TwistedRational f(mono(al, 0, 1) * (mono(al, 1, 0) + mono(al, 0, 0, -3.0)), mono(al, 1, 0) + mono(al, 0, 0, 1.0));
    TwistedRational g(mono(al, 2, 0, {0, 1}) + mono(al, 0, 1, 2.0), mono(al, 0, 0, 5.0) + mono(al, 1, 1));
    const auto p = CoverPoint::on_branch({0.7, 0.2}, 1);
    const cplx fv = f(p), gv = g(p);
    CHECK(std::abs((f + g)(p) - (fv + gv)) < 1e-13);
    CHECK(std::abs((f - g)(p) - (fv - gv)) < 1e-13);
    CHECK(std::abs((f * g)(p) - (fv * gv)) < 1e-13);
    CHECK(std::abs((f / g)(p) - (fv / gv)) < 1e-13);
    CHECK_THROWS_AS(f / TwistedRational::constant(al, 0.0), Error);
}

TEST_CASE("pole is reported") {
    TwistedRational r(ExpPoly::constant(0.5, 1.0), mono(0.5, 1, 0) + ExpPoly::constant(0.5, 1.0));
    try {
        (void)evaluate(r, -1.0, 0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::pole);
    }
}

TEST_CASE("roots with multiplicity") {
    std::vector<cplx> roots{1.0, 1.0, -2.0};
    auto c = poly_from_roots(roots);
    auto r = poly_roots(std::span<const cplx>(c));
    REQUIRE(r.size() == 2);
    CHECK(std::abs(r[0].value + 2.0) < 1e-12);
    CHECK(r[0].multiplicity == 1);
    CHECK(std::abs(r[1].value - 1.0) < 1e-9);
    CHECK(r[1].multiplicity == 2);
}

TEST_CASE("zero roots are stripped exactly, triple root found") {
    std::vector<cplx> roots{0.0, 0.0, {0.3, 0.4}, {0.3, 0.4}, {0.3, 0.4}, 5.0};
    auto c = poly_from_roots(roots);
    c[0] = c[1] = 0.0;
    auto r = poly_roots(ExpPoly::from_polynomial(1.0, c));
    REQUIRE(r.size() == 3);
    CHECK(r[0].value == 0.0);
    CHECK(r[0].multiplicity == 2);
    CHECK(r[1].multiplicity == 3);
    CHECK(std::abs(r[1].value - cplx(0.3, 0.4)) < 1e-8);
    CHECK(std::abs(r[2].value - 5.0) < 1e-10);
}

TEST_CASE("degree 14 random roots") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> N;
    std::vector<cplx> roots;
    for (int i = 0; i < 14; ++i) roots.emplace_back(N(rng), N(rng));
    auto c = poly_from_roots(roots);
    auto r = poly_roots(std::span<const cplx>(c));
    REQUIRE(r.size() == 14);
    for (cplx t : roots) {
        double best = 1e9;
        for (const auto& x : r) best = std::min(best, std::abs(x.value - t));
        CHECK(best < 1e-9);
    }
}

TEST_CASE("zero polynomial and non-polynomials are rejected") {
    CHECK_THROWS_AS(poly_roots(ExpPoly(1.0)), Error);
    CHECK_THROWS_AS(poly_roots(mono(0.5, 0, 1)), Error);
}

TEST_CASE("common roots cancel") {
    const double al = 0.5;
    std::vector<cplx> nr{1.0, -2.0}, dr{1.0, 1.0, -3.0};
    auto n = poly_from_roots(nr), d = poly_from_roots(dr);
    TwistedRational r(ExpPoly::from_polynomial(al, n).times_monomial({0, 1}), ExpPoly::from_polynomial(al, d));
    auto c = cancel_common_roots(r);
    REQUIRE(c.has_value());
    CHECK(c->num().size() == 2);
    auto dd = split_monomial(c->den());
    REQUIRE(dd.has_value());
    CHECK(dd->poly.size() == 3);
    const auto p = CoverPoint::on_branch({0.2, 0.9}, 0);
    CHECK(std::abs((*c)(p) - r(p)) < 1e-12);
}

TEST_CASE("json round trip is exact") {
    const double al = 0.7;
    TwistedRational r(mono(al, 0, 1, {0.1, 1.0 / 3}) + mono(al, 3, 0, -2.0 / 7), mono(al, 1, 0, std::sqrt(2.0)) + ExpPoly::constant(al, 1.0));
    auto j = to_json(r);
    auto back = map_from_json(json::parse(j.dump()));
    CHECK(back.num() == r.num());
    CHECK(back.den() == r.den());
    CHECK(back.alpha() == r.alpha());
    CHECK_THROWS_AS(map_from_json(json::parse(R"({"alpha":0.5,"num":[{"a":0.5,"b":0}]})")), Error);
}

TEST_CASE("rescaled argument") {
    const double al = 0.5;
    TwistedRational r(mono(al, 0, 1) * (mono(al, 2, 0) + ExpPoly::constant(al, -1.0)), mono(al, 2, 0) + ExpPoly::constant(al, 2.0));
    const double lam = 0.6;
    auto s = r.rescaled_argument(lam);
    const auto p = CoverPoint::on_branch({0.3, 0.8}, 0);
    CHECK(std::abs(s(p) - r(CoverPoint::from_log(p.log + std::log(lam)))) < 1e-14);
}
