#include "triplex/identification.hpp"

#include <cmath>

#include "triplex/math.hpp"

namespace triplex {

double cic_counterfactual_cdf(const CellSamples& control_t0, const CellSamples& control_t1,
                              const CellSamples& treated_t0, double y) {
  EmpiricalCdf c0(control_t0), c1(control_t1), d1(treated_t0);
  return d1.cdf(c0.quantile(c1.cdf(y)));
}

double triple_changes_counterfactual_cdf(const CellTable& table, double y) {
  table.require_chain_cells();
  return compose_chain(triple_changes_cdf_chain(), table, y);
}

namespace {

// One relaxed step F^{-1}_b(F_a(y) + shift) with the probability clamped
// before the quantile. shift = 0 reproduces the unshifted step bitwise.
double shifted_step(const EmpiricalCdf& a, const EmpiricalCdf& b, double y, double shift) {
  return b.quantile(clamp01(a.cdf(y) + shift));
}

void check_slack(double eps, double delta) {
  if (eps < 0.0 || delta < 0.0)
    throw Error(Errc::NegativeSlack, "eps and delta must be nonnegative");
}

// The relaxed triple-changes chain with the probability shifted by `shift`
// before every quantile link and once more at the end.
double shifted_triple_chain(const CellTable& table, double y, double shift) {
  EmpiricalCdf f_s1d0t0(table.cell(cell_id(1, 0, 0)));
  EmpiricalCdf f_s1d0t1(table.cell(cell_id(1, 0, 1)));
  EmpiricalCdf f_s0d0t0(table.cell(cell_id(0, 0, 0)));
  EmpiricalCdf f_s0d0t1(table.cell(cell_id(0, 0, 1)));
  EmpiricalCdf f_s0d1t0(table.cell(cell_id(0, 1, 0)));
  EmpiricalCdf f_s0d1t1(table.cell(cell_id(0, 1, 1)));
  EmpiricalCdf f_s1d1t0(table.cell(cell_id(1, 1, 0)));

  double v = shifted_step(f_s1d0t1, f_s1d0t0, y, shift);   // Psi^{-1}_{s1,d0}
  v = shifted_step(f_s0d0t0, f_s0d0t1, v, shift);          // Psi_{s0,d0}
  v = shifted_step(f_s0d1t1, f_s0d1t0, v, shift);          // Psi^{-1}_{s0,d1}
  return clamp01(f_s1d1t0.cdf(v) + shift);
}

}  // namespace

BoundsResult partial_bounds_triple(const CellTable& table, double y, double eps, double delta) {
  check_slack(eps, delta);
  table.require_chain_cells();
  const double c = eps + delta;
  return BoundsResult{shifted_triple_chain(table, y, -c), shifted_triple_chain(table, y, c), eps,
                      delta};
}

BoundsResult partial_bounds_cic(const CellSamples& control_t0, const CellSamples& control_t1,
                                const CellSamples& treated_t0, double y, double eps, double delta) {
  check_slack(eps, delta);
  EmpiricalCdf c0(control_t0), c1(control_t1), d1(treated_t0);
  const double c = eps + delta;
  auto relaxed = [&](double shift) {
    return clamp01(d1.cdf(c0.quantile(clamp01(c1.cdf(y) + shift))) + shift);
  };
  return BoundsResult{relaxed(-c), relaxed(c), eps, delta};
}

double joint_counterfactual_cdf(const PanelPairs& pairs, const CdfEvaluator& counterfactual_marginal,
                                const EmpiricalCdf& marginal_t0, double y0, double y1) {
  pairs.validate();
  const double threshold0 = marginal_t0.quantile(counterfactual_marginal(y0));
  std::size_t count = 0;
  for (const auto& [a, b] : pairs.pairs)
    if (a <= threshold0 && b <= y1) ++count;
  return static_cast<double>(count) / static_cast<double>(pairs.pairs.size());
}

}  // namespace triplex
