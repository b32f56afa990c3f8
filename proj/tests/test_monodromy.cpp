#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sphcone/families.hpp"
#include "sphcone/monodromy.hpp"

using namespace sphcone;

namespace {

PSU2Element random_psu2(std::mt19937_64& rng) {
    std::normal_distribution<double> N;
    cplx a(N(rng), N(rng)), b(N(rng), N(rng));
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    return PSU2Element::make(a / n, b / n);
}

Polyline circle(cplx c, double r, int n = 64) {
    Polyline p;
    for (int k = 0; k <= n; ++k) p.push_back(c + std::polar(r, two_pi * k / n));
    p.back() = p.front();
    return p;
}

}  // namespace

TEST_CASE("matrix examples") {
    CHECK((psu2_to_so3(PSU2Element::identity()) - Mat3::Identity()).norm() < 1e-15);
    const double th = 0.37;
    Mat3 R;
    R << std::cos(2 * th), std::sin(2 * th), 0, -std::sin(2 * th), std::cos(2 * th), 0, 0, 0, 1;
    CHECK((psu2_to_so3(PSU2Element::make(std::polar(1.0, th), 0.0)) - R).norm() < 1e-15);
    CHECK((psu2_to_so3(PSU2Element::make(0.0, 1.0)) - Vec3(-1, 1, -1).asDiagonal().toDenseMatrix()).norm() < 1e-15);
    CHECK_THROWS_AS(psu2_to_so3(PSU2Element{2.0, 0.0}), Error);
}

TEST_CASE("homomorphism and orthogonality on random pairs") {
    std::mt19937_64 rng(3);
    double worst_hom = 0, worst_orth = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto A = random_psu2(rng), B = random_psu2(rng);
        const Mat3 a = psu2_to_so3(A), b = psu2_to_so3(B);
        worst_hom = std::max(worst_hom, (psu2_to_so3(A * B) - a * b).cwiseAbs().maxCoeff());
        worst_orth = std::max(worst_orth, (a.transpose() * a - Mat3::Identity()).cwiseAbs().maxCoeff());
        worst_orth = std::max(worst_orth, std::abs(a.determinant() - 1));
    }
    CHECK(worst_hom < 1e-9);
    CHECK(worst_orth < 1e-10);
}

TEST_CASE("the matrix rotates phi(f) into phi of the conjugate action") {
    std::mt19937_64 rng(5);
    auto phi = [](cplx f) {
        const double s = 1 + std::norm(f);
        return Vec3(2 * f.real() / s, 2 * f.imag() / s, (std::norm(f) - 1) / s);
    };
    for (int t = 0; t < 20; ++t) {
        const auto A = random_psu2(rng);
        const cplx f(0.3 * t - 2, 1.1 - 0.07 * t);
        CHECK((so3_action(A) * phi(f) - phi(A.apply(f))).norm() < 1e-12);
        CHECK((psu2_to_so3(A) * phi(f) - phi(A.conjugated().apply(f))).norm() < 1e-12);
    }
}

TEST_CASE("w around the origin flips the sign") {
    TwistedRational f(ExpPoly::monomial(0.5, {0, 1}));
    const auto m = continue_along(f, circle(0.0, 1.0), {}, "unit");
    CHECK(m.winding == 1);
    CHECK(m.psu2.distance(PSU2Element::make(I, 0.0)) < 1e-10);
    CHECK(std::abs(m.psu2.a - I) < 1e-10);
}

TEST_CASE("single-valued maps and contractible loops give the identity") {
    TwistedRational f(ExpPoly::monomial(1.0, {2, 0}));
    CHECK(continue_along(f, circle(0.0, 1.0)).psu2.distance(PSU2Element::identity()) < 1e-8);
    const auto g = ex1_final_map();
    const auto m = continue_along(g, circle({1.0, 1.0}, 0.5));
    CHECK(m.winding == 0);
    CHECK(m.psu2.distance(PSU2Element::identity()) < 1e-8);
}

TEST_CASE("intro family beta = 1/2, k = 2 around 0") {
    const auto m = continue_along(intro_map(0.5, 2), circle(0.0, 0.5));
    CHECK((m.so3 - Vec3(-1, -1, 1).asDiagonal().toDenseMatrix()).norm() < 1e-8);
}

TEST_CASE("non-unitary monodromy and singular loops are rejected") {
    TwistedRational f(ExpPoly::monomial(0.5, {0, 1}) + ExpPoly::constant(0.5, 1.0));
    try {
        (void)continue_along(f, circle(0.0, 1.0));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::not_unitary);
    }
    try {
        (void)continue_along(ex1_final_map(), circle(1.0, 1.0));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::singular_loop);
    }
    CHECK_THROWS_AS(continue_along(ex1_final_map(), Polyline{1.0, 2.0, I}), Error);
}

TEST_CASE("classification") {
    CHECK(classify(make_metric(TwistedRational(ExpPoly::monomial(1.0, {2, 0})))).kind ==
          MonodromyClass::trivially_reducible);
    for (auto f : {intro_map(0.5, 1), intro_map(1.5, 2), ex1_final_map()}) {
        const auto c = classify(make_metric(f));
        CHECK(c.kind == MonodromyClass::reducible);
        REQUIRE(c.axis.has_value());
        CHECK((*c.axis - Vec3(0, 0, 1)).norm() < 1e-8);
        for (const auto& g : c.generators) {
            CHECK((g.so3.transpose() * g.so3 - Mat3::Identity()).norm() < 1e-10);
            CHECK(std::abs(g.so3.determinant() - 1) < 1e-10);
        }
    }
}

TEST_CASE("axis coordinate is single-valued, the others are not") {
    DevelopingMap F(intro_map(0.5, 2));
    std::vector<cplx> pts{{0.5, 0.3}, {-0.7, 0.9}, {1.3, -0.2}};
    CHECK(single_valuedness(support_candidate(F, Vec3(0, 0, 1)), pts) < 1e-12);
    CHECK(single_valuedness(support_candidate(F, Vec3(1, 0, 0)), pts) > 1e-3);
}
