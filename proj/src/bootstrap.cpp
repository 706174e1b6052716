#include "triplex/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "triplex/parallel.hpp"
#include "triplex/rng.hpp"

namespace triplex {

namespace {

CellTable resample_table(const CellTable& table, RngStream& rng) {
  CellTable out;
  for (CellId id : all_cells()) {
    if (!table.has(id)) continue;
    const auto& v = table.cell(id).values();
    std::vector<double> draw(v.size());
    for (double& x : draw) x = v[rng.index(v.size())];
    out.set(CellSamples(id, std::move(draw)));
  }
  return out;
}

// Order statistic at the generalized-inverse position, same convention as the
// empirical quantile: smallest k with k/B >= u.
double percentile(const std::vector<double>& sorted, double u) {
  const std::size_t n = sorted.size();
  std::size_t lo = 1, hi = n;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (static_cast<double>(mid) / static_cast<double>(n) >= u)
      hi = mid;
    else
      lo = mid + 1;
  }
  return sorted[lo - 1];
}

}  // namespace

BootstrapReport bootstrap_ci(const CellTable& table, const EstimatorKind& kind, std::size_t B,
                             double level, std::uint64_t seed) {
  if (B < 50) throw Error(Errc::BadInput, "bootstrap needs at least 50 replicates");
  if (!(level > 0.0 && level < 1.0))
    throw Error(Errc::BadInput, "confidence level must lie in (0,1)");

  BootstrapReport report;
  report.point = estimate_att(table, kind).tau_hat;
  report.level = level;
  report.replicates = B;
  report.seed = seed;

  std::vector<double> taus(B);
  std::vector<char> failed(B, 0);
  parallel_for(B, [&](std::size_t b) {
    RngStream rng(seed, {0x626f6f74ULL, b});  // one stream per replicate
    try {
      taus[b] = estimate_att(resample_table(table, rng), kind).tau_hat;
    } catch (const Error&) {
      failed[b] = 1;
    }
  });

  std::vector<double> ok;
  ok.reserve(B);
  for (std::size_t b = 0; b < B; ++b)
    if (!failed[b]) ok.push_back(taus[b]);
  if (ok.size() < B - B / 20)
    throw Error(Errc::BootstrapFailure,
                std::to_string(B - ok.size()) + " of " + std::to_string(B) +
                    " bootstrap replicates failed");

  std::sort(ok.begin(), ok.end());
  const double alpha = 1.0 - level;
  report.lo = percentile(ok, alpha / 2.0);
  report.hi = percentile(ok, 1.0 - alpha / 2.0);

  double mean = 0.0;
  for (double t : ok) mean += t;
  mean /= static_cast<double>(ok.size());
  double ss = 0.0;
  for (double t : ok) ss += (t - mean) * (t - mean);
  report.replicate_sd = ok.size() > 1 ? std::sqrt(ss / static_cast<double>(ok.size() - 1)) : 0.0;
  return report;
}

}  // namespace triplex
