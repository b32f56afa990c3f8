#pragma once

// Cross-module pipelines behind the CLI subcommands and the reproductions.
// Each returns a Report; mathematical failures become failing checks, bad
// input throws Error(Errc::invalid_input).

#include <cstdint>
#include <optional>
#include <string>

#include "sphcone/quad_diff.hpp"
#include "sphcone/report.hpp"
#include "sphcone/twistor.hpp"
#include "sphcone/weierstrass.hpp"

namespace sphcone {

struct GridOptions {
    std::string grid = "annulus:0.3:1.7:16";
    double exclusion = 0.05;  // around finite cone points
    double h = 1e-3;
};

Report cones_report(const TwistedRational& f);
Report monodromy_report(const TwistedRational& f);
Report residues_report(const TwistedRational& f, int basis_index = 0, double tol = 1e-9);

struct ScanRequest {
    std::string family = "ex1";  // sqrt(z)(z + b + 1)/(z + 1)
    double lo = 1.0, hi = 7.0;
    ScanOptions opt;
    std::optional<std::vector<double>> expect;  // roots the scan should find
    double root_tol = 1e-8;
};
Report scan_report(const ScanRequest& req, std::string* csv = nullptr);

struct WeierstrassRequest {
    int basis_index = 0;
    cplx z0{1.0, 0.5};
    double closure_tol = 1e-6;
    double residual_tol = 1e-4;  // absolute, on the grid
    double gram_min = 0.1;
    GridOptions grid{"annulus:0.2:3.0:8", 0.05, 1e-3};
};
Report weierstrass_report(const TwistedRational& f, const WeierstrassRequest& req = {});

// {"kind": "support", "s": [x, y, z]}
// {"kind": "intro", "beta": b, "k": k}
// {"kind": "twistor", "G": [map, map, map]}     (h = (G, phi(f)))
// optional "part": "re" | "im" (default: both)
std::vector<EigenCandidate> eigen_from_json(const json& j, const TwistedRational& f);
Report verify_report(const TwistedRational& f, const json& eigen, const GridOptions& g, double tol = 1e-5);

// construct: the map, the G_j and the verdicts
Report construct_report(int m, int k, double alpha, const ConstructionOptions& opt = {});

// reproductions
Report reproduce_ex1();
Report reproduce_intro(double beta, int k, const GridOptions& g = {"annulus:0.3:1.7:64", 0.05, 1e-3},
                       double tol = 1e-5);
// m = 2 also checks equivalence with the introductory family
Report reproduce_construct(int m, int k, double alpha, std::uint64_t seed = 1);
Report reproduce_noextra(std::uint64_t seed = 1, int configs = 20);

// z -> lambda z with lambda^k = (k - alpha)/(sqrt 2 (2k - alpha)), then
// f(lambda z) / intro(z) should be constant; returns its worst relative spread
double intro_equivalence(const TwistedRational& f, int k, double alpha, int points = 20, std::uint64_t seed = 1);

}  // namespace sphcone
