#pragma once

// Spherical conical metrics given by a developing map f, and numerical checks
// of candidate eigenfunctions of the Laplacian (Delta_g u + 2u = 0).

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sphcone/exp_algebra.hpp"

namespace sphcone {

struct ConePoint {
    bool at_infinity = false;
    cplx position = 0.0;
    double angle = 1.0;  // cone angle / 2 pi
    bool is_integer = false;
};

// f together with N', D' so that everything below is pole-safe.
class DevelopingMap {
public:
    explicit DevelopingMap(TwistedRational f);

    const TwistedRational& map() const noexcept { return f_; }
    double alpha() const noexcept { return f_.alpha(); }

    struct Jet {
        cplx N, D, W;  // f = N/D, f' = W/D^2
    };
    Jet jet(const CoverPoint& p) const;

    cplx value(const CoverPoint& p) const { return f_(p); }
    Vec3 phi(const CoverPoint& p) const;
    CVec3 phi_z(const CoverPoint& p) const;
    // conformal factor of f^* g_S2:  4|f'|^2 / (1 + |f|^2)^2
    double density(const CoverPoint& p) const;
    double phi_z_sq(const CoverPoint& p) const { return 0.5 * density(p); }

private:
    TwistedRational f_;
    ExpPoly dN_, dD_;
};

Vec3 stereographic(const TwistedRational& f, cplx z, int branch);
double metric_density(const TwistedRational& f, cplx z, int branch);

// Cone points of f^* g_S2 on the sphere.  Requires f' to be a monomial times
// a polynomial in z; otherwise Errc::outside_family.
std::vector<ConePoint> cone_points(const TwistedRational& f);

struct ConicalMetric {
    TwistedRational f;
    std::vector<ConePoint> cones;
};
ConicalMetric make_metric(TwistedRational f);

bool is_integer_angle(double beta);

class EigenCandidate {
public:
    using Rule = std::function<cplx(const CoverPoint&)>;
    // An evaluator to be used for points near `center`.  Path-integrated
    // candidates return one that integrates from the center, so that
    // stencil values share their rounding.
    using Patch = std::function<Rule(const CoverPoint& center)>;

    EigenCandidate(std::string name, Rule rule, bool single_valued = true, Patch patch = {});

    cplx operator()(const CoverPoint& p) const { return rule_(p); }
    cplx evaluate(cplx z, int branch) const { return rule_(CoverPoint::on_branch(z, branch)); }
    Rule patch(const CoverPoint& center) const { return patch_ ? patch_(center) : rule_; }

    EigenCandidate real_part() const;
    EigenCandidate imag_part() const;

    const std::string& name() const noexcept { return name_; }
    bool claims_single_valued() const noexcept { return single_valued_; }

private:
    std::string name_;
    Rule rule_;
    bool single_valued_;
    Patch patch_;
};

// u = (phi, s), the baseline eigenfunctions
EigenCandidate support_candidate(const DevelopingMap& f, const Vec3& s);

enum class Stencil { second_order, fourth_order };

struct ResidualOptions {
    double h = 1e-3;
    Stencil stencil = Stencil::fourth_order;
};

// |u + u_{z zbar} / |phi_z|^2|
double eigen_residual(const EigenCandidate& u, const DevelopingMap& f, const CoverPoint& p,
                      const ResidualOptions& opt = {});
double eigen_residual(const EigenCandidate& u, const TwistedRational& f, cplx z, int branch, double h);

struct Grid {
    std::string spec;
    std::vector<cplx> points;
};

// "annulus:rmin:rmax:n" (n radii x n angles) or "rect:x0:x1:y0:y1:n"
Grid parse_grid(const std::string& spec);
// drop points within `radius` of a finite cone point, and within `cut` of the
// negative real axis
Grid exclude_points(const Grid& g, const std::vector<ConePoint>& cones, double radius, double cut);

struct VerifyReport {
    std::size_t points = 0;
    double h = 0;
    double max_residual = 0;
    cplx worst_point = 0.0;
    double sup_u = 0;
    double tolerance = 0;  // rel_tol * (1 + sup_u)
    bool pass = false;
};

VerifyReport verify_grid(const EigenCandidate& u, const DevelopingMap& f, std::span<const cplx> pts,
                         const ResidualOptions& opt = {}, double rel_tol = 1e-5, int branch = 0);

// max |u(z, branch 0) - u(z, branch 1)|
double single_valuedness(const EigenCandidate& u, std::span<const cplx> pts);

// X = u phi + (u_z phi_zbar + u_zbar phi_z) / |phi_z|^2 for the real part of u
Vec3 x_from_u(const EigenCandidate& u, const DevelopingMap& f, const CoverPoint& p, double h = 1e-3);

struct ConformalityCheck {
    double isotropy = 0;     // |(X_z, X_z)| (C-bilinear)
    double isotropy_rel = 0; // same, divided by <X_z, X_z>
    double gauss_sine = 0;   // sine of the angle between X_z and phi_zbar
    Vec3 X = Vec3::Zero();
};
ConformalityCheck check_x_conformal(const EigenCandidate& u, const DevelopingMap& f, const CoverPoint& p,
                                    double h = 1e-3);

// relative remainder of u after least-squares projection on span{(phi, e_i)}
double gram_remainder(const EigenCandidate& u, const DevelopingMap& f, std::span<const cplx> pts, int branch = 0);

}  // namespace sphcone
