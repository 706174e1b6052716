#ifndef TRIPLEX_VARIANCE_HPP_
#define TRIPLEX_VARIANCE_HPP_

#include <array>

#include "triplex/cells.hpp"

namespace triplex {

// Asymptotic-variance decomposition of the empirical triple-changes ATT.
// sqrt(N) * (tau_hat - tau) is asymptotically normal with variance
// sum_k V_k / p_k, one term per design cell. Each V_k is the second moment of
// a centered influence term over "its" cell:
//
//   k = 0  (s1,d1,t1)  deviation of the treated post-period outcome
//   k = 1  (s0,d1,t1)  estimating the outer quantile link
//   k = 2  (s0,d1,t0)  estimating the fifth cdf link
//   k = 3  (s0,d0,t0)  estimating the fourth quantile link
//   k = 4  (s0,d0,t1)  estimating the third cdf link
//   k = 5  (s1,d0,t1)  estimating the second quantile link
//   k = 6  (s1,d0,t0)  estimating the innermost cdf link
//   k = 7  (s1,d1,t0)  deviation of the mapped pre-period outcome
//
// Quantile-link terms carry a 1/density factor at the link output; every term
// is multiplied by the chain-rule derivative of the links downstream of it,
// evaluated at the chain's intermediate points. Densities come from gaussian
// kernel estimates; everything else is the exact empirical machinery.
struct VarianceReport {
  std::array<double, 8> v{};          // V_0 .. V_7
  std::array<double, 8> p_weights{};  // cell shares N_k / N, same order
  double total = 0.0;                 // sum_k V_k / p_k
  double se = 0.0;                    // sqrt(total / N)
  std::size_t n_total = 0;
  // Mean of the k-th influence term over its own cell. Influence terms are
  // centered, so these must vanish as the cells grow.
  std::array<double, 8> term_cell_means{};
};

// The cell order pairing V_k with its weight p_k.
constexpr std::array<CellId, 8> variance_cell_order() {
  return {cell_id(1, 1, 1), cell_id(0, 1, 1), cell_id(0, 1, 0), cell_id(0, 0, 0),
          cell_id(0, 0, 1), cell_id(1, 0, 1), cell_id(1, 0, 0), cell_id(1, 1, 0)};
}

// Plug-in estimate of the decomposition above: empirical CDFs and quantiles
// for the distribution links, kernel densities for the density factors,
// sample averages for the expectations. Throws DensityUnderflow when a
// plugged density drops below 1e-12 (a support mismatch between cells).
VarianceReport plugin_variance(const CellTable& table);

}  // namespace triplex

#endif  // TRIPLEX_VARIANCE_HPP_
