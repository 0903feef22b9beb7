#pragma once

#include <ostream>

namespace phantom {

// Quick built-in checks: oracle equivalence on seeded random layers, the
// selection and balancing golden cases, and report determinism. Returns the
// number of failed checks.
int run_selftest(std::ostream& out);

}  // namespace phantom
