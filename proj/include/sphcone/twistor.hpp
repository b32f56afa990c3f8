#pragma once

// Directrix curves in C^{2m+1}, the special basis of their twistor lift with
// respect to an isotropic plane L', and the limiting developing map with its
// extra eigenfunctions.
//
// Coordinates: "labeled" vectors use the basis e0, E1, Ebar1, ..., Em, Ebarm
// (index 0, 2j-1, 2j); "real" vectors use the orthonormal e0, ..., e_{2m}
// with E_j = (e_{2j-1} + i e_{2j}) / sqrt 2.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sphcone/metric_lab.hpp"

namespace sphcone {

using CVec = Eigen::VectorXcd;

inline TwistedRational zero_rational() { return TwistedRational(ExpPoly()); }

class BilinearSpace {
public:
    explicit BilinearSpace(int m);

    int m() const noexcept { return m_; }
    int dim() const noexcept { return 2 * m_ + 1; }
    static int e0() { return 0; }
    static int E(int j) { return 2 * j - 1; }
    static int Ebar(int j) { return 2 * j; }
    std::string label(int i) const;

    // (e0,e0) = 1, (E_j, Ebar_k) = delta_jk, all else 0
    cplx gram(int i, int j) const;
    cplx product(const CVec& x, const CVec& y) const;  // labeled coordinates
    CVec labeled_from_real(const CVec& r) const;
    CVec real_from_labeled(const CVec& l) const;

private:
    int m_;
};

struct VFunction {
    std::vector<TwistedRational> comps;  // labeled basis

    double alpha() const { return comps.front().alpha(); }
    VFunction derivative() const;
    CVec operator()(const CoverPoint& p) const;  // labeled coordinates
};

TwistedRational bilinear(const BilinearSpace& S, const VFunction& x, const VFunction& y);
// (x, c) for a constant vector c in labeled coordinates
TwistedRational bilinear(const BilinearSpace& S, const VFunction& x, const CVec& c);

// The exponent pattern of the family; coefficients still free.
struct DirectrixSkeleton {
    int m = 2;
    int k = 1;
    double alpha = 0.5;

    // coefficients a_0 .. a_{m-2}, a_alpha (size m)
    VFunction with(std::span<const cplx> a) const;
};

DirectrixSkeleton directrix_family(int m, int k, double alpha);

struct DirectrixCurve {
    DirectrixSkeleton skeleton;
    std::vector<cplx> a;  // a_0 .. a_{m-2}, a_alpha

    VFunction xi() const { return skeleton.with(a); }
    // xi, xi', ..., xi^(m-1): spans the twistor lift
    std::vector<VFunction> lift() const;
};

// (xi^(i), xi^(j)) == 0 for 0 <= i <= j <= m-1, solved as a linear system in a
DirectrixCurve solve_coefficients(const DirectrixSkeleton& s);

struct IsotropyCheck {
    bool ok = false;
    double worst = 0;  // largest coefficient of any (xi^(i), xi^(j))
};
IsotropyCheck isotropy_verify(const DirectrixCurve& c, double tol = 1e-12);

// An isotropic (m-1)-plane L' in span{E_m, Ebar_m}^perp with (E'_j, conj E'_k)
// = delta_jk, and a real orthonormal basis v1, v2, v3 of V = (L' + conj L')^perp,
// v1 = e_{2m-1}, v2 = -e_{2m}.  All in real coordinates.
struct LPrime {
    int m = 2;
    std::string label;
    std::vector<CVec> E;
    std::array<CVec, 3> V;
};

// E'_1 = (e0 - i e2)/sqrt 2, E'_j = (e_{2j-3} - i e_{2j})/sqrt 2, v3 = e_{2m-3}
LPrime default_lprime(int m);
// (q1 - i q2)/sqrt 2, ... from a random orthonormal frame of span{e0..e_{2m-2}}
LPrime random_lprime(int m, std::mt19937_64& rng);
// L' given by explicit vectors (real coordinates); checks isotropy and completes V
LPrime lprime_from_vectors(int m, std::vector<CVec> E, std::string label);

// smallest sine of the angles between L' and L'_0 = span{E_1..E_{m-1}} or its conjugate
double separation_from_l0(const LPrime& L);

// smallest sine of the angle between Psi(z) and L' over sampled z, radii
// 1e-6 ... 1e6 included to stand in for the limits at 0 and infinity
double min_intersection_sine(const BilinearSpace& S, std::span<const VFunction> psi, const LPrime& L);

struct SpecialBasis {
    std::vector<VFunction> F;  // F_1 .. F_{m-1}, then F_m
    // V-components (v1, v2, v3) of F_j, j < m, and w of F_m
    std::vector<std::array<TwistedRational, 3>> G;
    std::array<TwistedRational, 3> w{zero_rational(), zero_rational(), zero_rational()};
    // L'-components: u[j][k] is the coefficient of E'_k in F_j (j = 0..m-1)
    std::vector<std::vector<TwistedRational>> u;
    double min_sine = 0;
};

// Gauss-Jordan over TwistedRational on the Ebar'-coordinates.  Throws
// Errc::pivot_zero when Psi meets L'.
SpecialBasis special_basis(const BilinearSpace& S, std::span<const VFunction> psi, const LPrime& L,
                           double sine_tol = 1e-3);

struct LimitingMap {
    TwistedRational f = zero_rational();  // normalized: f(1) = 1 on branch 0
    cplx scale = 1.0;     // raw map = scale * f
    // G_j carried along the normalization (V-rotation that scales f)
    std::vector<std::array<TwistedRational, 3>> G;
};

// f = w3 / (w1 - i w2); Errc::degenerate_projection if that is identically 0/0
LimitingMap limiting_map(const SpecialBasis& b);
// f -> s f with G_j transformed along (E_m -> s E_m, conj E_m -> conj E_m / s)
LimitingMap rescaled(const LimitingMap& lm, cplx s);

// h_j = (G_j, phi(f)) on the log-cover
std::vector<EigenCandidate> extra_eigenfunctions(const LimitingMap& lm);
EigenCandidate twistor_eigenfunction(const TwistedRational& f, const std::array<TwistedRational, 3>& G,
                                     std::string name);

struct EigenVerdict {
    std::string name;          // e.g. "Re h1"
    VerifyReport report;
    double single_valued = 0;  // branch 0 vs 1
    double gram = 0;
    std::vector<double> probe_slopes;  // one per cone point
    bool bounded = false;
    bool pass = false;
};

struct ConstructionOptions {
    std::string grid = "annulus:0.3:1.7:16";
    double exclusion = 0.05;
    double residual_tol = 1e-4;
    std::vector<double> steps{1e-3, 2e-3, 4e-3};  // difference steps tried
    double gram_min = 0.1;
    double sine_tol = 1e-3;
    int retries = 8;
    std::uint64_t seed = 1;
};

struct ConstructionResult {
    DirectrixCurve curve;
    IsotropyCheck isotropy;
    LPrime lprime;
    SpecialBasis basis;
    LimitingMap map;
    std::vector<ConePoint> cones;
    std::vector<EigenCandidate> eigenfunctions;  // complex h_j
    std::vector<EigenVerdict> verdicts;          // Re/Im of each h_j
    int attempts = 0;
    std::vector<std::string> log;  // one line per rejected plane
};

// steps (1)-(5); Errc::no_admissible_plane when the retry budget runs out
ConstructionResult run_algorithm(int m, int k, double alpha, const ConstructionOptions& opt = {});

// verification used by run_algorithm, exposed for reports
std::vector<EigenVerdict> verify_eigenfunctions(const std::vector<EigenCandidate>& h, const TwistedRational& f,
                                                const std::vector<ConePoint>& cones, const ConstructionOptions& opt);

}  // namespace sphcone
