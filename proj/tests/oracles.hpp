// Reference implementations used as test oracles. Everything here evaluates
// the textbook definitions by direct loops, independently of the library's
// search/merge strategies, so agreement is meaningful.
#ifndef TRIPLEX_TESTS_ORACLES_HPP_
#define TRIPLEX_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "triplex/cells.hpp"
#include "triplex/empirical.hpp"
#include "triplex/rng.hpp"
#include "triplex/transport.hpp"

namespace oracle {

using namespace triplex;

// #{x_i <= y} / n by a full scan.
inline double naive_cdf(const std::vector<double>& values, double y) {
  std::size_t count = 0;
  for (double x : values)
    if (x <= y) ++count;
  return static_cast<double>(count) / static_cast<double>(values.size());
}

// Smallest sample value whose cdf reaches u, scanning values in ascending
// order and recounting from scratch each time.
inline double naive_quantile(std::vector<double> values, double u) {
  std::sort(values.begin(), values.end());
  if (u < 0.0) u = 0.0;
  if (u > 1.0) u = 1.0;
  for (double v : values)
    if (naive_cdf(values, v) >= u) return v;
  return values.back();
}

inline double naive_chain(const ChainSpec& chain, const CellTable& table, double y) {
  double value = y;
  for (auto it = chain.links.rbegin(); it != chain.links.rend(); ++it) {
    const auto& cell_values = table.cell(it->cell).values();
    value = it->kind == LinkKind::Cdf ? naive_cdf(cell_values, value)
                                      : naive_quantile(cell_values, value);
  }
  return value;
}

inline double naive_triple_cdf(const CellTable& table, double y) {
  return naive_chain(triple_changes_cdf_chain(), table, y);
}

// The relaxed chain evaluated step by step: shift every quantile argument and
// the final probability by `shift`, clamping to [0,1] each time.
inline double naive_shifted_triple(const CellTable& table, double y, double shift) {
  auto clamp = [](double u) { return u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u); };
  auto step = [&](CellId a, CellId b, double v) {
    return naive_quantile(table.cell(b).values(),
                          clamp(naive_cdf(table.cell(a).values(), v) + shift));
  };
  double v = step(cell_id(1, 0, 1), cell_id(1, 0, 0), y);
  v = step(cell_id(0, 0, 0), cell_id(0, 0, 1), v);
  v = step(cell_id(0, 1, 1), cell_id(0, 1, 0), v);
  return clamp(naive_cdf(table.cell(cell_id(1, 1, 0)).values(), v) + shift);
}

inline double naive_shifted_cic(const std::vector<double>& control_t0,
                                const std::vector<double>& control_t1,
                                const std::vector<double>& treated_t0, double y, double shift) {
  auto clamp = [](double u) { return u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u); };
  const double v = naive_quantile(control_t0, clamp(naive_cdf(control_t1, y) + shift));
  return clamp(naive_cdf(treated_t0, v) + shift);
}

// Minimum assignment cost over all permutations, n <= ~8.
inline double brute_force_assignment_cost(const PointCloud& source, const PointCloud& target) {
  const std::size_t n = source.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      cost += squared_distance(source.point(i), target.point(perm[i]));
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Random fixtures ------------------------------------------------------------

inline std::vector<double> random_values(RngStream& rng, std::size_t n, bool allow_ties) {
  std::vector<double> v(n);
  for (double& x : v) {
    x = allow_ties ? static_cast<double>(rng.index(8)) : rng.normal(0.0, 1.0);
  }
  return v;
}

inline CellTable random_table(RngStream& rng, std::size_t max_n, bool allow_ties,
                              bool include_treated_post = true) {
  CellTable table;
  for (CellId id : all_cells()) {
    if (!include_treated_post && id == cell_id(1, 1, 1)) continue;
    const std::size_t n = 1 + rng.index(max_n);
    table.set(CellSamples(id, random_values(rng, n, allow_ties)));
  }
  return table;
}

inline PointCloud random_cloud(RngStream& rng, std::size_t n, std::size_t dim,
                               double center = 0.0) {
  std::vector<double> data(n * dim);
  for (double& x : data) x = center + rng.normal(0.0, 1.0);
  return PointCloud(dim, std::move(data));
}

}  // namespace oracle

#endif  // TRIPLEX_TESTS_ORACLES_HPP_
