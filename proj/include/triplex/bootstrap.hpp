#ifndef TRIPLEX_BOOTSTRAP_HPP_
#define TRIPLEX_BOOTSTRAP_HPP_

#include <cstdint>

#include "triplex/estimators.hpp"

namespace triplex {

struct BootstrapReport {
  double point = 0.0;      // estimate on the original table
  double level = 0.9;
  double lo = 0.0;         // percentile interval
  double hi = 0.0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  double replicate_sd = 0.0;  // spread of the replicate estimates
};

// Stratified bootstrap: every cell is resampled with replacement
// independently, the estimator is recomputed B times, and the percentile
// interval at (1-level)/2 and 1-(1-level)/2 is reported. Replicate b draws
// from a stream derived from (seed, b), so the report is identical for a
// given seed no matter how replicates are scheduled. Aborts if more than 5%
// of replicates fail.
BootstrapReport bootstrap_ci(const CellTable& table, const EstimatorKind& kind, std::size_t B,
                             double level, std::uint64_t seed);

}  // namespace triplex

#endif  // TRIPLEX_BOOTSTRAP_HPP_
