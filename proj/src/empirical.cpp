#include "triplex/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace triplex {

namespace {

// The step heights k/n, k = 1..n. Both the scalar and the batch paths must use
// this exact expression so their comparisons agree bitwise.
inline double step_value(std::size_t k, std::size_t n) {
  return static_cast<double>(k) / static_cast<double>(n);
}

inline double validate_probability(double u, const CellSamples& cell) {
  if (std::isnan(u) || u < -EmpiricalCdf::prob_tolerance ||
      u > 1.0 + EmpiricalCdf::prob_tolerance) {
    throw Error(Errc::InvalidProbability,
                "probability " + std::to_string(u) + " outside [0,1] for cell " +
                    cell_name(cell.id()));
  }
  return u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u);
}

}  // namespace

double EmpiricalCdf::cdf(double y) const {
  const auto& v = samples_->values();
  auto it = std::upper_bound(v.begin(), v.end(), y);
  return step_value(static_cast<std::size_t>(it - v.begin()), v.size());
}

double EmpiricalCdf::quantile(double u) const {
  const auto& v = samples_->values();
  const std::size_t n = v.size();
  u = validate_probability(u, *samples_);
  // Smallest k in [1, n] with k/n >= u; u <= 1/n lands on the minimum sample.
  std::size_t lo = 1, hi = n;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (step_value(mid, n) >= u)
      hi = mid;
    else
      lo = mid + 1;
  }
  return v[lo - 1];
}

void EmpiricalCdf::cdf_sorted(std::span<const double> ys, std::vector<double>& out) const {
  const auto& v = samples_->values();
  const std::size_t n = v.size();
  out.resize(ys.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    while (k < n && v[k] <= ys[i]) ++k;
    out[i] = step_value(k, n);
  }
}

void EmpiricalCdf::quantile_sorted(std::span<const double> us, std::vector<double>& out) const {
  const auto& v = samples_->values();
  const std::size_t n = v.size();
  out.resize(us.size());
  std::size_t k = 1;
  for (std::size_t i = 0; i < us.size(); ++i) {
    double u = validate_probability(us[i], *samples_);
    while (k < n && step_value(k, n) < u) ++k;
    out[i] = v[k - 1];
  }
}

double compose_chain(const ChainSpec& chain, const CellTable& table, double y) {
  // Links are applied from the back of the list; "index from the input end"
  // in errors counts the same way the evaluation proceeds.
  bool holds_probability = false;
  double value = y;
  for (std::size_t step = 0; step < chain.links.size(); ++step) {
    const ChainLink& link = chain.links[chain.links.size() - 1 - step];
    try {
      EmpiricalCdf dist(table.cell(link.cell));
      if (link.kind == LinkKind::Cdf) {
        if (holds_probability)
          throw Error(Errc::ChainTypeError, "cdf link fed a probability");
        value = dist.cdf(value);
        holds_probability = true;
      } else {
        if (!holds_probability)
          throw Error(Errc::ChainTypeError, "quantile link fed an outcome value");
        value = dist.quantile(value);
        holds_probability = false;
      }
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (chain link " + std::to_string(step) + ")");
    }
  }
  return value;
}

ChainSpec cic_cdf_chain(State s) {
  const int si = static_cast<int>(s);
  return ChainSpec{{
      {LinkKind::Cdf, cell_id(si, 1, 0)},
      {LinkKind::Quantile, cell_id(si, 0, 0)},
      {LinkKind::Cdf, cell_id(si, 0, 1)},
  }};
}

ChainSpec triple_changes_cdf_chain() {
  return ChainSpec{{
      {LinkKind::Cdf, cell_id(1, 1, 0)},
      {LinkKind::Quantile, cell_id(0, 1, 0)},
      {LinkKind::Cdf, cell_id(0, 1, 1)},
      {LinkKind::Quantile, cell_id(0, 0, 1)},
      {LinkKind::Cdf, cell_id(0, 0, 0)},
      {LinkKind::Quantile, cell_id(1, 0, 0)},
      {LinkKind::Cdf, cell_id(1, 0, 1)},
  }};
}

ChainSpec triple_changes_map_chain() {
  return ChainSpec{{
      {LinkKind::Quantile, cell_id(0, 1, 1)},
      {LinkKind::Cdf, cell_id(0, 1, 0)},
      {LinkKind::Quantile, cell_id(0, 0, 0)},
      {LinkKind::Cdf, cell_id(0, 0, 1)},
      {LinkKind::Quantile, cell_id(1, 0, 1)},
      {LinkKind::Cdf, cell_id(1, 0, 0)},
  }};
}

ChainSpec cic_map_chain(State s) {
  const int si = static_cast<int>(s);
  return ChainSpec{{
      {LinkKind::Quantile, cell_id(si, 0, 1)},
      {LinkKind::Cdf, cell_id(si, 0, 0)},
  }};
}

}  // namespace triplex
