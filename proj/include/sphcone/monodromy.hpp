#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sphcone/metric_lab.hpp"

namespace sphcone {

// [[a, b], [-conj b, conj a]], acting by f -> (a f + b) / (-conj(b) f + conj(a)).
struct PSU2Element {
    cplx a = 1.0;
    cplx b = 0.0;

    // rejects |a|^2 + |b|^2 != 1 (1e-12) and fixes the sign
    static PSU2Element make(cplx a, cplx b);
    static PSU2Element identity() { return {}; }

    Eigen::Matrix2cd matrix() const;
    PSU2Element operator*(const PSU2Element& o) const;
    PSU2Element conjugated() const { return make(std::conj(a), std::conj(b)); }
    cplx apply(cplx f) const;
    // distance in PSU(2), i.e. minimized over the sign
    double distance(const PSU2Element& o) const;
};

// The matrix of the classical identification, entry by entry.
Mat3 psu2_to_so3(const PSU2Element& A);
// Rotation of phi induced by f -> A f.  This is psu2_to_so3 of the entrywise
// conjugate: psu2_to_so3(A) itself rotates phi(f) into phi(conj(A) f).
Mat3 so3_action(const PSU2Element& A);

struct MonodromyElement {
    PSU2Element psu2;  // f continued = psu2 . f
    Mat3 so3;          // phi continued = so3 * phi
    std::string loop_label;
    double fit_residual = 0;      // 4th-sample consistency of the Moebius fit
    double unitarity_defect = 0;  // distance of the fitted matrix to SU(2)
    int winding = 0;              // turns about 0
};

using Polyline = std::vector<cplx>;

// Continue f along a closed polyline starting at loop.front() on branch 0.
MonodromyElement continue_along(const TwistedRational& f, const Polyline& loop,
                                const std::vector<cplx>& avoid = {}, std::string label = "");

struct GeneratorLoop {
    std::string label;
    cplx center;
    Polyline path;  // closed, starts and ends at the base point
};

// Lassos from `base` around every finite cone point, except the last one
// when infinity is not a cone point.
std::vector<GeneratorLoop> generator_loops(const std::vector<ConePoint>& cones, cplx base, int segments = 128);

enum class MonodromyClass { trivially_reducible, reducible, irreducible };
std::string to_string(MonodromyClass c);

struct Classification {
    MonodromyClass kind = MonodromyClass::irreducible;
    std::optional<Vec3> axis;
    double axis_residual = 0;  // smallest singular value of the stacked (A - I)
    std::vector<MonodromyElement> generators;
};

Classification classify(const ConicalMetric& m, cplx base = {1.0, 0.5});

}  // namespace sphcone
