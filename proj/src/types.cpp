#include "sphcone/types.hpp"

#include <cmath>

namespace sphcone {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::invalid_input: return "invalid input";
        case Errc::alpha_mismatch: return "exponent mismatch";
        case Errc::division_by_zero: return "division by zero";
        case Errc::branch_point: return "origin is a branch point";
        case Errc::pole: return "pole";
        case Errc::not_polynomial: return "not a polynomial";
        case Errc::zero_polynomial: return "zero polynomial";
        case Errc::root_residual: return "root residual too large";
        case Errc::outside_family: return "outside supported family";
        case Errc::singular_loop: return "loop hits singularity";
        case Errc::singular_path: return "singularity on path";
        case Errc::not_unitary: return "monodromy not unitary";
        case Errc::invalid_circle: return "invalid circle";
        case Errc::quadrature_unresolved: return "quadrature unresolved";
        case Errc::integration_unresolved: return "integration unresolved";
        case Errc::closure_failed: return "closure unsatisfiable";
        case Errc::degenerate_family: return "family degenerate";
        case Errc::pivot_zero: return "L' intersects Psi; choose another plane";
        case Errc::degenerate_projection: return "degenerate projection";
        case Errc::no_admissible_plane: return "no admissible plane found";
    }
    return "error";
}

CoverPoint CoverPoint::on_branch(cplx z, int branch) {
    if (z == 0.0) throw Error(Errc::branch_point, "z = 0 has no lift");
    return {z, std::log(z) + cplx(0.0, two_pi * branch)};
}

CoverPoint CoverPoint::from_log(cplx log) { return {std::exp(log), log}; }

CoverPoint CoverPoint::near(cplx z2) const {
    if (z2 == 0.0) throw Error(Errc::branch_point, "z = 0 has no lift");
    return {z2, log + std::log(z2 / z)};
}

int CoverPoint::branch() const {
    return static_cast<int>(std::lround((log.imag() - std::arg(z)) / two_pi));
}

}  // namespace sphcone
