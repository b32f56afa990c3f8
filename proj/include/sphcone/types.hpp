#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sphcone {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline const cplx I{0.0, 1.0};

// Failure categories; the CLI maps input-kind errors to exit code 2 and the
// rest to exit code 1.
enum class Errc {
    invalid_input,
    alpha_mismatch,
    division_by_zero,
    branch_point,
    pole,
    not_polynomial,
    zero_polynomial,
    root_residual,
    outside_family,
    singular_loop,
    singular_path,
    not_unitary,
    invalid_circle,
    quadrature_unresolved,
    integration_unresolved,
    closure_failed,
    degenerate_family,
    pivot_zero,
    degenerate_projection,
    no_admissible_plane,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

// A point of the logarithmic cover of C*: z together with a chosen value of log z.
struct CoverPoint {
    cplx z;
    cplx log;

    static CoverPoint on_branch(cplx z, int branch);
    static CoverPoint from_log(cplx log);

    // Lift of z2 obtained by continuing log along the straight segment from z.
    CoverPoint near(cplx z2) const;
    // Same point of C* on another sheet.
    CoverPoint turned(int turns) const { return {z, log + cplx(0.0, two_pi * turns)}; }
    int branch() const;
};

}  // namespace sphcone
