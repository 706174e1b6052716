#ifndef TRIPLEX_IDENTIFICATION_HPP_
#define TRIPLEX_IDENTIFICATION_HPP_

#include <functional>
#include <utility>
#include <vector>

#include "triplex/empirical.hpp"

namespace triplex {

// Changes-in-changes counterfactual CDF of the untreated post-period outcome
// in the treated group, from three cells of one state:
//   F_{t0|d1} o F^{-1}_{t0|d0} o F_{t1|d0} (y)
double cic_counterfactual_cdf(const CellSamples& control_t0, const CellSamples& control_t1,
                              const CellSamples& treated_t0, double y);

// Triple-changes counterfactual CDF (the seven-link chain over the seven
// cells other than (s1,d1,t1)).
double triple_changes_counterfactual_cdf(const CellTable& table, double y);

// Interval produced by the partial-identification bounds. eps bounds the
// probability mass on which monotonicity of the production functions may
// fail; delta bounds the Kolmogorov drift of the latent distribution over
// time. Zero slack collapses the interval onto the point-identified value.
struct BoundsResult {
  double lower;
  double upper;
  double eps;
  double delta;
};

// Bounds on the triple-changes counterfactual CDF. The combined slack
// c = eps + delta is subtracted (lower) or added (upper) to the probability
// before every quantile link and once more at the end; every probability is
// clamped to [0,1] before use.
BoundsResult partial_bounds_triple(const CellTable& table, double y, double eps, double delta);

// Same relaxation for the two-group changes-in-changes chain.
BoundsResult partial_bounds_cic(const CellSamples& control_t0, const CellSamples& control_t1,
                                const CellSamples& treated_t0, double y, double eps, double delta);

// Outcome pairs of the (s1,d1) cohort linked across the two periods by
// individual id. Required by the joint estimand; repeated cross-sections
// cannot fabricate these.
struct PanelPairs {
  std::vector<std::pair<double, double>> pairs;  // (y at t0, y at t1)

  void validate() const {
    if (pairs.empty()) throw Error(Errc::EmptyPanel, "no linked outcome pairs");
    for (const auto& [a, b] : pairs)
      if (!std::isfinite(a) || !std::isfinite(b))
        throw Error(Errc::BadInput, "non-finite panel outcome");
  }
};

using CdfEvaluator = std::function<double(double)>;

// Joint CDF of (untreated counterfactual at t1, treated outcome at t1) in the
// (s1,d1) cohort under strong time invariance:
//   F_joint(y0, y1) = F_{Y(t0),Y(t1)|s1,d1}( F^{-1}_{Y(t0)|s1,d1}(G(y0)), y1 )
// where G is the counterfactual marginal (the point-identified chain or
// either bound) and the outer joint CDF counts pairs below both thresholds.
double joint_counterfactual_cdf(const PanelPairs& pairs, const CdfEvaluator& counterfactual_marginal,
                                const EmpiricalCdf& marginal_t0, double y0, double y1);

}  // namespace triplex

#endif  // TRIPLEX_IDENTIFICATION_HPP_
