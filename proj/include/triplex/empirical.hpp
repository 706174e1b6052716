#ifndef TRIPLEX_EMPIRICAL_HPP_
#define TRIPLEX_EMPIRICAL_HPP_

#include <span>
#include <vector>

#include "triplex/cells.hpp"

namespace triplex {

// Step-function empirical distribution of one cell. Pure counting, no
// interpolation, no smoothing:
//
//   cdf(y)      = #{i : x_i <= y} / n
//   quantile(u) = smallest sample value y with cdf(y) >= u
//
// The quantile argument is clamped to [1/n, 1] before the search, so u = 0
// returns the minimum sample and tiny negative/overshoot arguments from
// floating arithmetic are tolerated (see prob_tolerance). Outputs therefore
// always stay inside the observed support.
class EmpiricalCdf {
 public:
  // Probability arguments further than this outside [0,1] are rejected.
  static constexpr double prob_tolerance = 1e-9;

  explicit EmpiricalCdf(const CellSamples& samples) : samples_(&samples) {
    if (samples.empty())
      throw Error(Errc::EmptyCell, "empty cell " + cell_name(samples.id()));
  }
  // A view over externally owned samples; never bind a temporary.
  explicit EmpiricalCdf(CellSamples&&) = delete;

  const CellSamples& samples() const { return *samples_; }

  double cdf(double y) const;
  double quantile(double u) const;

  // Batch forms for ascending inputs; bit-identical to the per-point calls,
  // evaluated by a single merge pass.
  void cdf_sorted(std::span<const double> ys, std::vector<double>& out) const;
  void quantile_sorted(std::span<const double> us, std::vector<double>& out) const;

 private:
  const CellSamples* samples_;
};

inline double cdf_eval(const EmpiricalCdf& cdf, double y) { return cdf.cdf(y); }
inline double quantile_eval(const EmpiricalCdf& cdf, double u) { return cdf.quantile(u); }

enum class LinkKind { Cdf, Quantile };

struct ChainLink {
  LinkKind kind;
  CellId cell;
};

// An ordered composition of CDF / quantile links over named cells. Links are
// stored in composition order (outermost first) and applied right-to-left, so
// links.back() receives the input value.
struct ChainSpec {
  std::vector<ChainLink> links;
};

// Evaluates the chain at y, one link at a time. A cdf link consumes an
// outcome value and produces a probability; a quantile link does the reverse.
// Adjacent links must type-check; errors carry the offending link index
// (counted from the input end).
double compose_chain(const ChainSpec& chain, const CellTable& table, double y);

// Canonical chains used throughout.

// Changes-in-changes counterfactual CDF within one state:
//   F_{t0|d1} o F^{-1}_{t0|d0} o F_{t1|d0}
ChainSpec cic_cdf_chain(State s);

// Triple-changes counterfactual CDF (the seven-link composition):
//   F_{t0|s1d1} o F^{-1}_{t0|s0d1} o F_{t1|s0d1} o F^{-1}_{t1|s0d0}
//     o F_{t0|s0d0} o F^{-1}_{t0|s1d0} o F_{t1|s1d0}
ChainSpec triple_changes_cdf_chain();

// Value-to-value map sending a (s1,d1) pre-period outcome to its counterfactual
// post-period outcome (the six-link composition inside the ATT estimator):
//   F^{-1}_{s0d1t1} o F_{s0d1t0} o F^{-1}_{s0d0t0} o F_{s0d0t1}
//     o F^{-1}_{s1d0t1} o F_{s1d0t0}
ChainSpec triple_changes_map_chain();

// Same map for changes-in-changes within one state:
//   F^{-1}_{t1|s,d0} o F_{t0|s,d0}
ChainSpec cic_map_chain(State s);

}  // namespace triplex

#endif  // TRIPLEX_EMPIRICAL_HPP_
