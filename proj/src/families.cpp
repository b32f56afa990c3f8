#include "sphcone/families.hpp"

#include <cmath>
#include <sstream>

namespace sphcone {

TwistedRational ex1_family(double b) {
    const double al = 0.5;
    ExpPoly num = ExpPoly::monomial(al, {1, 1}) + ExpPoly::monomial(al, {0, 1}, b + 1);
    ExpPoly den = ExpPoly::monomial(al, {1, 0}) + ExpPoly::constant(al, 1.0);
    return TwistedRational(num, den);
}

TwistedRational ex1_final_map() { return ex1_family(-4.0); }

TwistedRational intro_map(double beta, int k) {
    ExpPoly num = ExpPoly::monomial(beta, {k, 1}, k - beta) + ExpPoly::monomial(beta, {0, 1}, -(k + beta));
    ExpPoly den = ExpPoly::monomial(beta, {k, 0}) + ExpPoly::constant(beta, 1.0);
    return TwistedRational(num, den);
}

EigenCandidate intro_candidate(double beta, int k) {
    std::ostringstream nm;
    nm << "h1/h2[beta=" << beta << ",k=" << k << "]";
    return EigenCandidate(nm.str(), [beta, k](const CoverPoint& p) {
        const cplx zk = std::pow(p.z, k);
        const cplx zkb = std::conj(zk);
        const double r2b = std::exp(2 * beta * std::log(std::abs(p.z)));
        const double h2 = std::norm(zk + 1.0) + r2b * std::norm((k - beta) * zk - (k + beta));
        const cplx h1 = (zk - 1.0) * (zkb + 1.0) + r2b * ((k + beta) + (k - beta) * zk) * ((k + beta) - (k - beta) * zkb);
        return h1 / h2;
    });
}

}  // namespace sphcone
