#pragma once

#include <ostream>

namespace sphcone {

// Exit codes: 0 every check passed, 1 a check failed or the mathematics broke
// down (a diagnostic report is still written), 2 bad flags or input.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sphcone
