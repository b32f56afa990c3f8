#pragma once

// Meromorphic quadratic differentials sigma = (num/den) dz^2 on the sphere,
// the one-forms sigma/df and the residue conditions at integer cone points.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sphcone/metric_lab.hpp"

namespace sphcone {

struct QuadDifferential {
    std::vector<cplx> num{1.0};  // ascending
    std::vector<cplx> den{1.0};

    cplx operator()(cplx z) const;
    // order of the pole at infinity: deg den - deg num - 4 < 0 means a pole
    // of order 4 + deg num - deg den
    int pole_order_at_infinity() const;
    QuadDifferential scaled(cplx c) const;
};

QuadDifferential operator+(const QuadDifferential& a, const QuadDifferential& b);

// z^j / prod (z - p_i), j = 0 .. d-1, with d = #points (+1 if infinity is a
// cone point) - 3: at most simple poles at the cone points, holomorphic
// elsewhere.
std::vector<QuadDifferential> qd_basis(std::span<const cplx> finite_points, bool infinity_is_cone);
std::vector<QuadDifferential> qd_basis(const std::vector<ConePoint>& cones);

// sigma / df as a twisted rational function in the exponent ring of f
TwistedRational omega_from_sigma(const QuadDifferential& s, const TwistedRational& f);

// (1 / 2 pi i) \oint sigma / df around p, with f continued from the branch-0
// germ at p.  Trapezoidal rule, checked against the same rule at radius r/2.
cplx residue_sigma_over_df(const QuadDifferential& s, const TwistedRational& f, cplx p, double radius,
                           int nodes = 2048);

// A radius that keeps the circle and its half clear of other singular points.
double residue_radius(cplx p, std::span<const cplx> others);

struct ConeResidue {
    cplx point;
    double angle;
    cplx residue;
};
// residues of sigma/df at every finite integer cone point
std::vector<ConeResidue> integer_residues(const QuadDifferential& s, const TwistedRational& f,
                                          const std::vector<ConePoint>& cones);

struct ScanOptions {
    int samples = 601;
    std::vector<double> excluded;  // parameter values where the family degenerates
    double exclusion_radius = 1e-3;
    double zero_tol = 1e-8;
    int basis_index = 0;
};

struct ScanSample {
    double b = 0;
    double abs_residue = 0;
    bool valid = false;
};

struct AdmissibleScan {
    std::vector<ScanSample> samples;
    std::vector<double> roots;
    std::vector<std::string> notes;
};

// Parameters in [lo, hi] for which sigma/df (sigma the chosen basis element)
// has zero residue at every integer cone point.
AdmissibleScan find_admissible(const std::function<TwistedRational(double)>& family, double lo, double hi,
                               const ScanOptions& opt = {});

}  // namespace sphcone
