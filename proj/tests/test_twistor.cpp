#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sphcone/families.hpp"
#include "sphcone/monodromy.hpp"
#include "sphcone/twistor.hpp"

using namespace sphcone;

namespace {

const double rt2 = std::sqrt(2.0);

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return Errc::invalid_input;
}

CVec real_unit(int n, int i) {
    CVec v = CVec::Zero(n);
    v[i] = 1.0;
    return v;
}

// exponent as a real number
double value(Exponent e, double al) { return e.a + e.b * al; }

// exponent of a monomial num / den
Exponent single_exponent(const TwistedRational& t) {
    REQUIRE(t.num().terms().size() == 1);
    REQUIRE(t.den().terms().size() == 1);
    const Exponent n = t.num().terms().begin()->first, d = t.den().terms().begin()->first;
    return {n.a - d.a, n.b - d.b};
}

// d^n/dz^n of c z^p at z
cplx dmono(cplx c, double p, int n, cplx z) {
    cplx fac = c;
    for (int i = 0; i < n; ++i) fac *= p - i;
    return fac == 0.0 ? 0.0 : fac * std::pow(z, p - n);
}

// xi^(n)(z) straight from the exponent pattern, labeled coordinates
CVec xi_direct(int m, int k, double al, const std::vector<cplx>& a, int n, cplx z) {
    CVec v = CVec::Zero(2 * m + 1);
    for (int j = 1; j <= m - 1; ++j) {
        v[2 * j] = dmono(a[j - 1], j - 1, n, z);
        v[2 * j - 1] = dmono(1.0, 2 * k - j + 1, n, z);
    }
    v[2 * m] = dmono(a[m - 1], m - 2 + al, n, z);
    v[2 * m - 1] = dmono(1.0, 2 * k - (m - 2 + al), n, z);
    v[0] = dmono(1.0, k, n, z);
    return v;
}

std::vector<cplx> sample_points(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> r(0.4, 2.0), t(-3.0, 3.0);
    std::vector<cplx> out;
    for (int i = 0; i < n; ++i) out.push_back(std::polar(r(rng), t(rng)));
    return out;
}

ConstructionResult m2_default(int k, double al) {
    const auto c = solve_coefficients(directrix_family(2, k, al));
    const BilinearSpace S(2);
    const auto psi = c.lift();
    ConstructionResult r;
    r.curve = c;
    r.lprime = default_lprime(2);
    r.basis = special_basis(S, psi, r.lprime);
    r.map = limiting_map(r.basis);
    r.cones = cone_points(r.map.f);
    r.eigenfunctions = extra_eigenfunctions(r.map);
    return r;
}

}  // namespace

TEST_CASE("bilinear space: Gram table and real coordinates") {
    const BilinearSpace S(3);
    CHECK(S.dim() == 7);
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) {
            cplx expect = 0.0;
            if (i == 0 && j == 0) expect = 1.0;
            for (int q = 1; q <= 3; ++q)
                if ((i == S.E(q) && j == S.Ebar(q)) || (i == S.Ebar(q) && j == S.E(q))) expect = 1.0;
            CHECK(S.gram(i, j) == expect);
        }
    CHECK(S.label(S.Ebar(2)) == "Ebar2");
    // the bilinear product in labeled coordinates is x^T y in real ones
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    CVec x(7), y(7);
    for (int i = 0; i < 7; ++i) {
        x[i] = {g(rng), g(rng)};
        y[i] = {g(rng), g(rng)};
    }
    CHECK(std::abs(S.product(S.labeled_from_real(x), S.labeled_from_real(y)) - (x.transpose() * y)(0)) < 1e-13);
    CHECK((S.real_from_labeled(S.labeled_from_real(x)) - x).norm() < 1e-14);
    // E_1 = (e1 + i e2)/sqrt 2
    const CVec E1 = S.real_from_labeled(real_unit(7, S.E(1)));
    CHECK(std::abs(E1[1] - 1 / rt2) < 1e-15);
    CHECK(std::abs(E1[2] - I / rt2) < 1e-15);
}

TEST_CASE("directrix family: parameters and exponent pattern") {
    CHECK(code_of([] { directrix_family(1, 2, 0.5); }) == Errc::invalid_input);
    CHECK(code_of([] { directrix_family(3, 1, 0.5); }) == Errc::invalid_input);
    CHECK(code_of([] { directrix_family(3, 4, 3.5); }) == Errc::invalid_input);
    CHECK(code_of([] { directrix_family(2, 2, 1.0); }) == Errc::invalid_input);

    const int m = 3, k = 4;
    const double al = 0.7;
    const auto s = directrix_family(m, k, al);
    const std::vector<cplx> ones(m, 1.0);
    const auto xi = s.with(ones);
    REQUIRE(xi.comps.size() == 7u);
    // E-side exponents mirror 2k minus the Ebar side
    for (int j = 1; j <= m; ++j) {
        const double lo = value(single_exponent(xi.comps[BilinearSpace::Ebar(j)]), al);
        const double hi = value(single_exponent(xi.comps[BilinearSpace::E(j)]), al);
        CHECK(lo + hi == doctest::Approx(2.0 * k));
    }
    CHECK(value(single_exponent(xi.comps[BilinearSpace::Ebar(m)]), al) == doctest::Approx(m - 2 + al));
    CHECK(value(single_exponent(xi.comps[0]), al) == doctest::Approx(k));

    // monodromy around 0 only turns span{E_m, Ebar_m}
    const auto p = CoverPoint::on_branch({0.8, 0.3}, 0);
    const auto q = CoverPoint::from_log(p.log + cplx(0, two_pi));
    const CVec v0 = xi(p), v1 = xi(q);
    const cplx rot = std::polar(1.0, two_pi * al);
    for (int i = 0; i < 7; ++i) {
        cplx expect = v0[i];
        if (i == BilinearSpace::Ebar(m)) expect = v0[i] * rot;
        if (i == BilinearSpace::E(m)) expect = v0[i] / rot;
        CHECK(std::abs(v1[i] - expect) < 1e-12 * (1 + std::abs(v0[i])));
    }
}

TEST_CASE("m = 2 coefficients against the closed form") {
    const auto c = solve_coefficients(directrix_family(2, 2, 1.5));
    CHECK(std::abs(c.a[1] - (-8.0 / 15.0)) < 1e-14);
    CHECK(std::abs(c.a[0] - 1.0 / 30.0) < 1e-14);
    // 2 a0 + 2 a_alpha + 1 = 0
    CHECK(std::abs(2.0 * c.a[0] + 2.0 * c.a[1] + 1.0) < 1e-14);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 12; ++trial) {
        const int k = 1 + static_cast<int>(rng() % 5);
        double al = std::uniform_real_distribution<double>(0.05, k - 0.05)(rng);
        if (std::abs(al - std::round(al)) < 0.02) al += 0.03;
        const auto d = solve_coefficients(directrix_family(2, k, al));
        const double den = 2 * al * (2 * k - al);
        CHECK(std::abs(d.a[1] + k * k / den) < 1e-12 * (1 + k * k / den));
        CHECK(std::abs(d.a[0] - (k - al) * (k - al) / den) < 1e-12 * (1 + k * k / den));
        CHECK(isotropy_verify(d).ok);
    }
}

TEST_CASE("isotropy") {
    auto c = solve_coefficients(directrix_family(2, 2, 1.5));
    const auto ok = isotropy_verify(c);
    CHECK(ok.ok);
    CHECK(ok.worst <= 1e-14);
    c.a[1] += 1e-3;
    CHECK_FALSE(isotropy_verify(c).ok);

    const auto c3 = solve_coefficients(directrix_family(3, 4, 0.7));
    CHECK(isotropy_verify(c3).ok);
    // rational solution of the m = 3 system, worked by hand
    CHECK(std::abs(c3.a[0] - (-529.0 / 1666.0)) < 1e-12);
    CHECK(std::abs(c3.a[1] - 4232.0 / 2597.0) < 1e-12);
    CHECK(std::abs(c3.a[2] - (-80000.0 / 44149.0)) < 1e-12);
    // pointwise, from power functions rather than the ExpPoly algebra
    const BilinearSpace S(3);
    for (cplx z : sample_points(6, 5))
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                const CVec x = xi_direct(3, 4, 0.7, c3.a, i, z), y = xi_direct(3, 4, 0.7, c3.a, j, z);
                CHECK(std::abs(S.product(x, y)) < 1e-11 * (1 + x.norm() * y.norm()));
            }
}

TEST_CASE("planes L'") {
    const auto L = default_lprime(3);
    REQUIRE(L.E.size() == 2u);
    for (const auto& a : L.E)
        for (const auto& b : L.E) {
            CHECK(std::abs((a.transpose() * b)(0)) < 1e-15);  // isotropic
        }
    CHECK(std::abs(L.E[0].dot(L.E[0]) - 1.0) < 1e-15);
    CHECK(std::abs(L.E[0].dot(L.E[1])) < 1e-15);
    for (const auto& v : L.V) {
        CHECK(std::abs(v.norm() - 1.0) < 1e-15);
        for (const auto& e : L.E) CHECK(std::abs((v.transpose() * e)(0)) < 1e-15);
    }
    CHECK(separation_from_l0(L) > 0.1);

    std::mt19937_64 rng(7);
    const auto R = random_lprime(3, rng);
    CHECK(std::abs((R.E[0].transpose() * R.E[1])(0)) < 1e-13);
    CHECK(std::abs((R.E[1].transpose() * R.E[1])(0)) < 1e-13);

    // span{E_1} is L'_0 itself: rejected
    const CVec E1 = (real_unit(5, 1) + I * real_unit(5, 2)) / rt2;
    const auto bad = lprime_from_vectors(2, {E1}, "E1");
    CHECK(separation_from_l0(bad) < 1e-12);
    const auto c = solve_coefficients(directrix_family(2, 2, 1.5));
    const auto psi = c.lift();
    CHECK(code_of([&] { special_basis(BilinearSpace(2), psi, bad); }) == Errc::pivot_zero);
    // not isotropic
    CHECK(code_of([] { lprime_from_vectors(2, {real_unit(5, 0)}, "e0"); }) == Errc::invalid_input);
}

TEST_CASE("special basis: isotropy and the Ebar' pattern") {
    for (auto [m, k, al] : {std::tuple{2, 2, 1.5}, std::tuple{3, 4, 0.7}}) {
        const BilinearSpace S(m);
        const auto c = solve_coefficients(directrix_family(m, k, al));
        const auto psi = c.lift();
        const auto L = default_lprime(m);
        const auto b = special_basis(S, psi, L);
        REQUIRE(static_cast<int>(b.F.size()) == m);
        CHECK(b.min_sine > 1e-3);
        for (cplx z : sample_points(5, 9)) {
            const auto p = CoverPoint::on_branch(z, 0);
            std::vector<CVec> F;
            for (const auto& f : b.F) F.push_back(S.real_from_labeled(f(p)));
            double scale = 0;
            for (const auto& v : F) scale = std::max(scale, v.norm());
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) CHECK(std::abs((F[i].transpose() * F[j])(0)) < 1e-9 * scale * scale);
            // (F_j, E'_k): the Ebar'_k coefficient
            for (int j = 0; j < m; ++j)
                for (int q = 0; q < m - 1; ++q) {
                    const cplx e = (F[j].transpose() * L.E[q])(0);
                    CHECK(std::abs(e - (j == q ? 1.0 : 0.0)) < 1e-9 * scale);
                }
            // the F_j still span Psi: each psi_i is a combination of them
            Eigen::MatrixXcd A(2 * m + 1, m), B(2 * m + 1, m);
            for (int j = 0; j < m; ++j) {
                A.col(j) = F[j];
                B.col(j) = S.real_from_labeled(psi[j](p));
            }
            const Eigen::MatrixXcd X = A.colPivHouseholderQr().solve(B);
            CHECK((A * X - B).norm() < 1e-8 * B.norm());
            // V-components and u reassemble F_m
            CVec back = CVec::Zero(2 * m + 1);
            for (int a = 0; a < 3; ++a) back += b.w[a](p) * L.V[a];
            for (int q = 0; q < m - 1; ++q) back += b.u[m - 1][q](p) * L.E[q];
            CHECK((back - F[m - 1]).norm() < 1e-9 * scale);
        }
    }
}

TEST_CASE("special basis of a basis already in the target form") {
    const BilinearSpace S(2);
    const auto c = solve_coefficients(directrix_family(2, 2, 1.5));
    const auto psi = c.lift();
    const auto L = default_lprime(2);
    const auto b = special_basis(S, psi, L);
    const auto again = special_basis(S, b.F, L);
    for (cplx z : sample_points(5, 2)) {
        const auto p = CoverPoint::on_branch(z, 0);
        for (int j = 0; j < 2; ++j) {
            const CVec x = b.F[j](p), y = again.F[j](p);
            CHECK((x - y).norm() < 1e-10 * (1 + x.norm()));
        }
    }
}

TEST_CASE("m = 2 limiting map is the introductory family") {
    for (auto [k, al] : {std::pair{2, 1.5}, std::pair{1, 0.5}, std::pair{3, 1.2}}) {
        const auto r = m2_default(k, al);
        const double beta = k - al;
        const auto g = intro_map(beta, k);
        const double lam = std::pow((k - al) / (rt2 * (2 * k - al)), 1.0 / k);
        cplx ratio = 0.0;
        for (cplx z : sample_points(20, 17)) {
            const auto q = CoverPoint::on_branch(z, 0);
            const cplx t = r.map.f(CoverPoint::from_log(q.log + std::log(lam))) / g(q);
            if (ratio == 0.0) ratio = t;
            CHECK(std::abs(t - ratio) < 1e-8 * std::abs(ratio));
        }
        // closed form (lambda^k > 0 convention)
        const double A = (k - al) / (rt2 * al), B = (k - al) / (rt2 * (2 * k - al));
        cplx c0 = 0.0;
        for (cplx z : sample_points(8, 23)) {
            const auto q = CoverPoint::on_branch(z, 0);
            const cplx zk = std::pow(z, k);
            const cplx closed = std::exp((k - al) * q.log) * (zk - A) / (zk + B);
            const cplx t = r.map.f(q) / closed;
            if (c0 == 0.0) c0 = t;
            CHECK(std::abs(t - c0) < 1e-9 * std::abs(c0));
        }
        CHECK(std::abs(r.map.f(CoverPoint::on_branch(1.0, 0)) - 1.0) < 1e-12);

        // cones: non-integer exactly at 0 and infinity
        for (const auto& p : r.cones) {
            const bool special = p.at_infinity || std::abs(p.position) < 1e-12;
            CHECK(p.is_integer != special);
            if (special) CHECK(p.angle == doctest::Approx(beta));
        }
        // monodromy: reducible about e3
        const auto cls = classify(make_metric(r.map.f));
        CHECK(cls.kind == MonodromyClass::reducible);
        REQUIRE(cls.axis.has_value());
        CHECK(std::abs(std::abs(cls.axis->z()) - 1.0) < 1e-9);
    }
}

TEST_CASE("m = 2 eigenfunction against the introductory h1, h2") {
    const int k = 2;
    const double al = 1.5, beta = 0.5;
    const auto r = m2_default(k, al);
    REQUIRE(r.eigenfunctions.size() == 1u);
    const DevelopingMap F(r.map.f);
    const auto g = exclude_points(parse_grid("annulus:0.3:1.7:16"), r.cones, 0.05, 0.0);
    for (const auto& u : {r.eigenfunctions[0].real_part(), r.eigenfunctions[0].imag_part()}) {
        const auto rep = verify_grid(u, F, g.points);
        CHECK(rep.max_residual <= 1e-5);
        CHECK(single_valuedness(u, g.points) < 1e-9);
        CHECK(gram_remainder(u, F, g.points) >= 0.1);
    }

    // rescale to the introductory map exactly, then compare h(lambda z)
    const double lam = std::pow((k - al) / (rt2 * (2 * k - al)), 1.0 / k);
    const auto q1 = CoverPoint::on_branch(1.0, 0);
    const cplx s = intro_map(beta, k)(q1) / r.map.f(CoverPoint::from_log(q1.log + std::log(lam)));
    const auto h = extra_eigenfunctions(rescaled(r.map, s))[0];
    const auto ref = intro_candidate(beta, k);
    cplx ratio = 0.0;
    for (cplx z : sample_points(20, 29)) {
        const auto q = CoverPoint::on_branch(z, 0);
        const cplx t = h(CoverPoint::from_log(q.log + std::log(lam))) / ref(q);
        if (ratio == 0.0) ratio = t;
        CHECK(std::abs(t - ratio) < 1e-6 * std::abs(ratio));
    }
}

TEST_CASE("rescaling keeps eigenfunctions") {
    const auto r = m2_default(1, 0.5);
    const auto lm = rescaled(r.map, cplx(2.0, -0.7));
    const auto cones = cone_points(lm.f);
    const auto v = verify_eigenfunctions(extra_eigenfunctions(lm), lm.f, cones, {});
    REQUIRE(v.size() == 2u);
    for (const auto& x : v)
        CHECK_MESSAGE(x.pass, x.name, " residual ", x.report.max_residual, " gram ", x.gram, " sv ", x.single_valued,
                      " bounded ", x.bounded);
}

TEST_CASE("the algorithm") {
    for (auto [m, k, al] : {std::tuple{2, 2, 1.5}, std::tuple{2, 1, 0.5}, std::tuple{3, 4, 0.7}}) {
        const auto r = run_algorithm(m, k, al);
        CHECK(r.isotropy.ok);
        CHECK(static_cast<int>(r.eigenfunctions.size()) == m - 1);
        REQUIRE(static_cast<int>(r.verdicts.size()) == 2 * (m - 1));
        for (const auto& v : r.verdicts) {
            CHECK_MESSAGE(v.pass, m, " ", k, " ", al, " ", v.name, " residual ", v.report.max_residual);
            // an independent look at one point off the verification grid
            const EigenCandidate u = v.name[0] == 'R' ? r.eigenfunctions[v.name.back() - '1'].real_part()
                                                      : r.eigenfunctions[v.name.back() - '1'].imag_part();
            CHECK(eigen_residual(u, r.map.f, {0.61, -0.93}, 0, 2e-3) < 1e-5 * (1 + v.report.sup_u));
        }
        const auto cls = classify(make_metric(r.map.f));
        CHECK(cls.kind == MonodromyClass::reducible);
        if (cls.axis) CHECK(std::abs(std::abs(cls.axis->z()) - 1.0) < 1e-9);
    }
}

TEST_CASE("retry budget") {
    ConstructionOptions opt;
    opt.sine_tol = 2.0;  // no plane can pass
    opt.retries = 3;
    CHECK(code_of([&] { run_algorithm(2, 2, 1.5, opt); }) == Errc::no_admissible_plane);
    // a fixed seed gives the same fallback planes
    std::mt19937_64 a(5), b(5);
    CHECK((random_lprime(3, a).E[0] - random_lprime(3, b).E[0]).norm() == 0.0);
}
