#pragma once

#include <ostream>

namespace holo {

/// Run the acceptance checks, printing one [PASS]/[FAIL] line per criterion.
/// `only` = 0 runs all criteria, otherwise just that criterion id (1-9).
/// Returns the number of failed criteria.
int run_acceptance(std::ostream& os, int only = 0);

}  // namespace holo
