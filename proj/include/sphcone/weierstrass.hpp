#pragma once

// X = X0 + 1/2 Re \int_{z0}^{z} (1 - f^2, i(1 + f^2), 2f) omega on the log-cover,
// the closure condition on its periods, and the support function (X, phi).

#include <memory>
#include <vector>

#include "sphcone/monodromy.hpp"
#include "sphcone/quad_diff.hpp"

namespace sphcone {

struct WeierstrassData {
    TwistedRational f;
    TwistedRational omega;   // omega / dz
    TwistedRational weight;  // omega / (D^2 dz), D the denominator of f
    cplx z0{1.0, 0.5};
    Vec3 X0 = Vec3::Zero();
    std::vector<cplx> singular;  // finite poles of the integrand (0 excluded)
    // weight's denominator as lead z^shift prod (z - r)^m; expanded
    // coefficients lose ~eps/dist^m near a multiple root
    std::vector<PolyRoot> den_roots;
    Exponent den_shift;
    cplx den_lead = 0.0;  // 0: not factored, evaluate weight directly
};

cplx weight_at(const WeierstrassData& d, const CoverPoint& q);

WeierstrassData make_weierstrass(const TwistedRational& f, const TwistedRational& omega, cplx z0 = {1.0, 0.5});
// omega = sigma / df
WeierstrassData make_weierstrass(const TwistedRational& f, const QuadDifferential& sigma, cplx z0 = {1.0, 0.5});

// finite poles of omega and of f^2 omega that are not integer cone points
std::vector<cplx> misplaced_poles(const WeierstrassData& d, const std::vector<ConePoint>& cones);

struct PathOptions {
    double abs_tol = 1e-11;
    double rel_tol = 1e-13;
    int max_depth = 50;
    long max_intervals = 200000;  // per straight piece
};

struct PathState {
    Polyline path;
    CoverPoint end;
    int branch = 0;
    CVec3 integral = CVec3::Zero();  // \int (1 - f^2, i(1 + f^2), 2f) omega
};

// Integrate along the polyline starting on `branch` at path.front().
PathState path_state(const WeierstrassData& d, const Polyline& path, int branch = 0, const PathOptions& opt = {});
// 1/2 Re of the integral
Vec3 path_integrate(const WeierstrassData& d, const Polyline& path, int branch = 0, const PathOptions& opt = {});

struct ClosureResult {
    Vec3 X0 = Vec3::Zero();
    double residual = 0;  // worst |(A - I) X0 - v|
    std::vector<double> loop_residuals;
    std::vector<Vec3> periods;    // v_gamma
    std::vector<double> axis_components;  // |v . axis| for non-trivial A
    bool axis_consistent = true;
};

ClosureResult closure_solve(const WeierstrassData& d, const std::vector<GeneratorLoop>& loops,
                            const std::vector<Mat3>& so3, const PathOptions& opt = {});

// X on the log-cover, integrated from z0 along a cached arc of radius |z0|
// followed by a radial leg; detours around integrand poles.
class SupportField {
public:
    explicit SupportField(WeierstrassData d, const PathOptions& opt = {});

    const WeierstrassData& data() const noexcept { return d_; }
    CVec3 integral(const CoverPoint& q) const;
    Vec3 X(const CoverPoint& q) const { return d_.X0 + 0.5 * integral(q).real(); }
    // integral from a to b along a straight (detoured if needed) route
    CVec3 leg(const CoverPoint& a, const CoverPoint& b) const;

private:
    WeierstrassData d_;
    PathOptions opt_;
    double r0_, th0_, step_;
    int J_;
    std::vector<CVec3> trunk_;  // integral up to arc node j - J_
};

EigenCandidate support_function(std::shared_ptr<const SupportField> field, const DevelopingMap& f);
// checks the closure residual first (Errc::closure_failed above tol)
EigenCandidate support_function(const WeierstrassData& d, const ClosureResult& c, double tol = 1e-6,
                                 const PathOptions& opt = {});

struct BoundednessResult {
    bool bounded = false;
    double slope = 0;
    std::vector<double> radii;
    std::vector<double> maxima;
};

// 0.01 x (distance to the nearest other finite cone, at most 1); at infinity
// 100 x (largest finite cone modulus, at least 1).  Small enough that a
// bounded u is already close to its limit.
double probe_radius(const ConePoint& p, const std::vector<ConePoint>& cones);

// max |u| on circles of radius 2^-j r0 (2^j r0 at infinity), j = 0..levels-1;
// log-log slope fitted over the innermost max(4, levels/3) circles
BoundednessResult boundedness_probe(const EigenCandidate& u, const ConePoint& p, double r0, int levels = 11,
                                    int samples = 32);

}  // namespace sphcone
