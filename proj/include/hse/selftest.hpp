#pragma once

#include <cstdint>

namespace hse {

struct OracleCheck {
  int cases = 0;
  double max_error = 0.0;
};

// Compares delta_gram against the dense moment-matrix distance for random
// ensembles with D in 2..6, k in 1..3 and T <= 50, over both accumulation
// routes.
OracleCheck oracle_equivalence_check(int ensembles_per_case, std::uint64_t seed);

}  // namespace hse
