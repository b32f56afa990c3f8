#pragma once

// Named developing maps and closed-form candidates used by the reproduction
// pipelines.

#include "sphcone/metric_lab.hpp"

namespace sphcone {

// sqrt(z) (z + b + 1) / (z + 1), alpha = 1/2
TwistedRational ex1_family(double b);
// sqrt(z) (z - 3) / (z + 1): the member b = -4
TwistedRational ex1_final_map();

// z^beta ((k - beta) z^k - (k + beta)) / (z^k + 1), alpha = beta
TwistedRational intro_map(double beta, int k);
// h1 / h2 (complex); its real and imaginary parts are the extra eigenfunctions
EigenCandidate intro_candidate(double beta, int k);

}  // namespace sphcone
