#include "hse/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hse/haar.hpp"
#include "hse/metrics.hpp"
#include "hse/rng.hpp"

namespace hse {

OracleCheck oracle_equivalence_check(int ensembles_per_case, std::uint64_t seed) {
  OracleCheck check;
  Rng rng(seed);
  for (Index dim = 2; dim <= 6; ++dim) {
    for (int k = 1; k <= 3; ++k) {
      const MomentMatrix haar = haar_moment_dense(dim, k);
      for (int e = 0; e < ensembles_per_case; ++e) {
        const auto length = static_cast<std::size_t>(1 + std::min<std::uint64_t>(49, rng() % 50));
        std::vector<CVector> states;
        for (std::size_t t = 0; t < length; ++t) states.push_back(sample_haar_state(dim, rng));
        const double dense = hs_distance_sq(temporal_moment_dense(states, k), haar);

        for (Index limit : {Index{0}, kDenseMomentCap}) {
          TemporalEnsemble ensemble(dim, k, EnsembleOptions{limit, false});
          for (const auto& s : states) ensemble.accumulate(s);
          check.max_error = std::max(check.max_error, std::abs(delta_gram(ensemble, k, dim) - dense));
        }
        ++check.cases;
      }
    }
  }
  return check;
}

}  // namespace hse
