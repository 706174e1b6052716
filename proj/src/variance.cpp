#include "triplex/variance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "triplex/empirical.hpp"
#include "triplex/kde.hpp"

namespace triplex {

namespace {

constexpr double kDensityFloor = 1e-12;

void check_density(double f, const char* where) {
  if (!(f >= kDensityFloor))
    throw Error(Errc::DensityUnderflow,
                std::string("plugged density underflow at ") + where);
}

// One centered influence term: mean_i (1{v <= b_i} - w_i) * m_i over the
// reference points i, where v is a transform of the evaluation sample. The
// b_i are ascending (monotone transforms of sorted inputs), so the indicator
// sum is a suffix of the m_i.
class InfluenceTerm {
 public:
  InfluenceTerm(std::vector<double> thresholds, const std::vector<double>& subtracted,
                const std::vector<double>& multipliers)
      : thresholds_(std::move(thresholds)), suffix_m_(thresholds_.size() + 1, 0.0) {
    const std::size_t n = thresholds_.size();
    for (std::size_t i = n; i-- > 0;) suffix_m_[i] = suffix_m_[i + 1] + multipliers[i];
    mean_wm_ = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean_wm_ += subtracted[i] * multipliers[i];
    mean_wm_ /= static_cast<double>(n);
  }

  double operator()(double v) const {
    auto it = std::lower_bound(thresholds_.begin(), thresholds_.end(), v);
    const double indicator_sum = suffix_m_[static_cast<std::size_t>(it - thresholds_.begin())];
    return indicator_sum / static_cast<double>(thresholds_.size()) - mean_wm_;
  }

 private:
  std::vector<double> thresholds_;
  std::vector<double> suffix_m_;
  double mean_wm_;
};

struct TermMoments {
  double second;  // mean of Q^2 over the cell
  double first;   // mean of Q over the cell (centering diagnostic)
};

TermMoments term_moments(const std::vector<double>& values, const InfluenceTerm& term,
                         const std::function<double(double)>& transform) {
  double ss = 0.0, s = 0.0;
  for (double y : values) {
    const double q = term(transform(y));
    ss += q * q;
    s += q;
  }
  const double n = static_cast<double>(values.size());
  return {ss / n, s / n};
}

}  // namespace

VarianceReport plugin_variance(const CellTable& table) {
  table.require_all_cells();

  const CellSamples& c_s0d1t1 = table.cell(cell_id(0, 1, 1));
  const CellSamples& c_s0d1t0 = table.cell(cell_id(0, 1, 0));
  const CellSamples& c_s0d0t0 = table.cell(cell_id(0, 0, 0));
  const CellSamples& c_s0d0t1 = table.cell(cell_id(0, 0, 1));
  const CellSamples& c_s1d0t1 = table.cell(cell_id(1, 0, 1));
  const CellSamples& c_s1d0t0 = table.cell(cell_id(1, 0, 0));
  const CellSamples& c_s1d1t0 = table.cell(cell_id(1, 1, 0));
  const CellSamples& c_s1d1t1 = table.cell(cell_id(1, 1, 1));

  EmpiricalCdf F_s0d1t1(c_s0d1t1), F_s0d1t0(c_s0d1t0), F_s0d0t0(c_s0d0t0), F_s0d0t1(c_s0d0t1),
      F_s1d0t1(c_s1d0t1), F_s1d0t0(c_s1d0t0);
  KernelDensity f_s0d1t1(c_s0d1t1), f_s0d1t0(c_s0d1t0), f_s0d0t0(c_s0d0t0), f_s0d0t1(c_s0d0t1),
      f_s1d0t1(c_s1d0t1);

  // Chain intermediates for every treated pre-period sample z, innermost link
  // first. All stay ascending, so batch merges apply throughout.
  const std::vector<double>& z = c_s1d1t0.values();
  const std::size_t nz = z.size();
  std::vector<double> r5, x5, r3, x3, r1, x1;
  F_s1d0t0.cdf_sorted(z, r5);
  F_s1d0t1.quantile_sorted(r5, x5);
  F_s0d0t1.cdf_sorted(x5, r3);
  F_s0d0t0.quantile_sorted(r3, x3);
  F_s0d1t0.cdf_sorted(x3, r1);
  F_s0d1t1.quantile_sorted(r1, x1);

  // Chain-rule derivative of the links downstream of each estimated link,
  // evaluated at the intermediate points. Quantile links contribute
  // 1/density, cdf links contribute density.
  std::vector<double> d2(nz), d4(nz), d6(nz);
  for (std::size_t i = 0; i < nz; ++i) {
    const double f1v = f_s0d1t1.density(x1[i]);
    const double f2v = f_s0d1t0.density(x3[i]);
    const double f3v = f_s0d0t0.density(x3[i]);
    const double f4v = f_s0d0t1.density(x5[i]);
    const double f5v = f_s1d0t1.density(x5[i]);
    check_density(f1v, "outer quantile link (s0,d1,t1)");
    check_density(f2v, "cdf link (s0,d1,t0)");
    check_density(f3v, "quantile link (s0,d0,t0)");
    check_density(f4v, "cdf link (s0,d0,t1)");
    check_density(f5v, "quantile link (s1,d0,t1)");
    d2[i] = 1.0 / f1v;
    d4[i] = d2[i] * f2v / f3v;
    d6[i] = d4[i] * f4v / f5v;
  }

  InfluenceTerm q1(r1, r1, d2);  // quantile estimation, outer link
  InfluenceTerm q2(x3, r1, d2);  // cdf estimation at the mapped point x3
  InfluenceTerm q3(r3, r3, d4);
  InfluenceTerm q4(x5, r3, d4);
  InfluenceTerm q5(r5, r5, d6);
  InfluenceTerm q6(std::vector<double>(z.begin(), z.end()), r5, d6);

  VarianceReport report;

  // V0: variance of the treated post-period outcome.
  {
    const auto& y = c_s1d1t1.values();
    const double mean = c_s1d1t1.mean();
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    report.v[0] = ss / static_cast<double>(y.size());
  }

  auto ident = [](double y) { return y; };
  auto assign = [&](std::size_t k, TermMoments m) {
    report.v[k] = m.second;
    report.term_cell_means[k] = m.first;
  };
  assign(1, term_moments(c_s0d1t1.values(), q1, [&](double y) { return F_s0d1t1.cdf(y); }));
  assign(2, term_moments(c_s0d1t0.values(), q2, ident));
  assign(3, term_moments(c_s0d0t0.values(), q3, [&](double y) { return F_s0d0t0.cdf(y); }));
  assign(4, term_moments(c_s0d0t1.values(), q4, ident));
  assign(5, term_moments(c_s1d0t1.values(), q5, [&](double y) { return F_s1d0t1.cdf(y); }));
  assign(6, term_moments(c_s1d0t0.values(), q6, ident));

  // V7: variance of the fully mapped pre-period outcome.
  {
    double mean = 0.0;
    for (double v : x1) mean += v;
    mean /= static_cast<double>(nz);
    double ss = 0.0;
    for (double v : x1) ss += (v - mean) * (v - mean);
    report.v[7] = ss / static_cast<double>(nz);
  }

  const double n_total = static_cast<double>(table.total_count());
  report.n_total = table.total_count();
  const auto order = variance_cell_order();
  report.total = 0.0;
  for (std::size_t k = 0; k < 8; ++k) {
    report.p_weights[k] = static_cast<double>(table.cell(order[k]).size()) / n_total;
    report.total += report.v[k] / report.p_weights[k];
  }
  report.se = std::sqrt(report.total / n_total);
  return report;
}

}  // namespace triplex
