// Acceptance suite: end-to-end statistical checks of the estimator stack.
// Each criterion prints one PASS/FAIL line; the process exits with the number
// of failures. Heavy Monte Carlo settings are pinned here, not tunable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "triplex/bootstrap.hpp"
#include "triplex/estimators.hpp"
#include "triplex/identification.hpp"
#include "triplex/parallel.hpp"
#include "triplex/simlab.hpp"
#include "triplex/transport.hpp"
#include "triplex/variance.hpp"

using namespace triplex;

namespace {

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<bool(std::string&)> run;
};

// Monte Carlo relative bias of one estimator: |1 - mean(tau_hat)/tau|.
// The mean over replications estimates E[tau_hat], so this measures the
// estimator's bias with the replication noise averaged out.
double mc_relative_bias(const DgmSpec& spec, EstimatorTag tag, std::size_t n, std::size_t reps,
                        std::uint64_t seed, double* mean_abs_eps = nullptr) {
  EstimatorKind kind{tag, spec.mle_families, State::S1};
  std::vector<double> taus(reps);
  parallel_for(reps, [&](std::size_t r) {
    taus[r] = estimate_att(generate(spec, n, mix_seed(seed, n, r)), kind).tau_hat;
  });
  double mean = 0.0, abs_eps = 0.0;
  for (double t : taus) {
    mean += t;
    abs_eps += std::fabs(1.0 - t / spec.true_tau);
  }
  mean /= static_cast<double>(reps);
  if (mean_abs_eps) *mean_abs_eps = abs_eps / static_cast<double>(reps);
  return std::fabs(1.0 - mean / spec.true_tau);
}

char buf[512];

bool criterion_oracle_equivalence(std::string& detail) {
  RngStream rng(2001);
  std::size_t checked = 0;
  for (int table_idx = 0; table_idx < 200; ++table_idx) {
    CellTable table = oracle::random_table(rng, 20, table_idx % 2 == 0);

    for (int k = 0; k < 4; ++k) {
      const double y = rng.normal(0.0, 2.0);
      if (triple_changes_counterfactual_cdf(table, y) != oracle::naive_triple_cdf(table, y)) {
        detail = "triple-changes chain diverged from the nested definition";
        return false;
      }
      ++checked;
    }

    ChainSpec chain;
    const std::size_t len = 1 + rng.index(8);
    bool expects_probability = false;
    for (std::size_t i = 0; i < len; ++i) {
      chain.links.insert(chain.links.begin(),
                         ChainLink{expects_probability ? LinkKind::Quantile : LinkKind::Cdf,
                                   all_cells()[rng.index(8)]});
      expects_probability = !expects_probability;
    }
    for (int k = 0; k < 4; ++k) {
      const double y = rng.normal(0.0, 2.0);
      if (compose_chain(chain, table, y) != oracle::naive_chain(chain, table, y)) {
        detail = "compose_chain diverged from the nested definition";
        return false;
      }
      ++checked;
    }
  }
  std::snprintf(buf, sizeof(buf), "%zu bitwise comparisons over 200 random tables", checked);
  detail = buf;
  return true;
}

bool criterion_bound_collapse(std::string& detail) {
  RngStream rng(2002);
  for (int table_idx = 0; table_idx < 100; ++table_idx) {
    CellTable table = oracle::random_table(rng, 15, table_idx % 2 == 0, false);
    const double y = rng.normal(0.0, 2.0);

    BoundsResult zero = partial_bounds_triple(table, y, 0.0, 0.0);
    const double point = triple_changes_counterfactual_cdf(table, y);
    if (zero.lower != point || zero.upper != point) {
      detail = "zero-slack bounds did not collapse onto the point value";
      return false;
    }

    const CellSamples& c0 = table.cell(cell_id(0, 0, 0));
    const CellSamples& c1 = table.cell(cell_id(0, 0, 1));
    const CellSamples& d1 = table.cell(cell_id(0, 1, 0));
    BoundsResult cic_zero = partial_bounds_cic(c0, c1, d1, y, 0.0, 0.0);
    const double cic_point = cic_counterfactual_cdf(c0, c1, d1, y);
    if (cic_zero.lower != cic_point || cic_zero.upper != cic_point) {
      detail = "zero-slack cic bounds did not collapse";
      return false;
    }

    double prev_lo = zero.lower, prev_hi = zero.upper;
    for (double slack : {0.03, 0.08, 0.2, 0.45}) {
      BoundsResult b = partial_bounds_triple(table, y, slack / 2, slack / 2);
      if (b.lower > prev_lo || b.upper < prev_hi) {
        detail = "bounds not nested under increasing slack";
        return false;
      }
      prev_lo = b.lower;
      prev_hi = b.upper;
    }
  }
  detail = "collapse exact and nesting monotone on 100 random tables";
  return true;
}

bool criterion_linear_dgm(std::string& detail) {
  const DgmSpec spec = dgm_linear();
  const std::size_t n = 5000, reps = 200;
  double eps_ccc, eps_ddd, eps_did, eps_cic;
  const double b_ccc = mc_relative_bias(spec, EstimatorTag::CccEmp, n, reps, 31, &eps_ccc);
  const double b_ddd = mc_relative_bias(spec, EstimatorTag::Ddd, n, reps, 32, &eps_ddd);
  const double b_did = mc_relative_bias(spec, EstimatorTag::Did, n, reps, 33, &eps_did);
  const double b_cic = mc_relative_bias(spec, EstimatorTag::CicEmp, n, reps, 34, &eps_cic);
  std::snprintf(buf, sizeof(buf),
                "bias: ccc-emp %.4f, ddd %.4f (<0.05); did %.4f, cic-emp %.4f (>0.10) "
                "[mean |eps|: %.3f %.3f %.3f %.3f]",
                b_ccc, b_ddd, b_did, b_cic, eps_ccc, eps_ddd, eps_did, eps_cic);
  detail = buf;
  return b_ccc < 0.05 && b_ddd < 0.05 && b_did > 0.10 && b_cic > 0.10;
}

bool criterion_nonlinear_dgm(std::string& detail) {
  const DgmSpec spec = dgm_nonlinear();
  const std::size_t n = 10000, reps = 100;
  const double b_ddd = mc_relative_bias(spec, EstimatorTag::Ddd, n, reps, 41);
  const double b_mle = mc_relative_bias(spec, EstimatorTag::CccMle, n, reps, 42);
  std::snprintf(buf, sizeof(buf), "bias: ddd %.4f (>0.10); ccc-mle %.4f (<0.05)", b_ddd, b_mle);
  detail = buf;
  return b_ddd > 0.10 && b_mle < 0.05;
}

bool criterion_misspecified_mle(std::string& detail) {
  const DgmSpec spec = dgm_exponential_misspec();
  const std::size_t n = 10000, reps = 100;
  // The mechanism's family assignment is gaussian: misspecified on purpose.
  //
  // Known limitation of the empirical clause at this sample size: the treated
  // cohort's pre-period outcomes (rate 0.5) are far heavier-tailed than the
  // control cells they are mapped through (rate 1.5), so the empirical chain
  // truncates the tail at the control maxima. The resulting bias is
  // 2*exp(-M/2) with M the control sample maximum, about 0.077 at n = 1e4 and
  // decaying only like n^(-1/3); no estimator can recover the map beyond the
  // observed control support. The threshold is asserted as stated anyway.
  const double b_mle = mc_relative_bias(spec, EstimatorTag::CccMle, n, reps, 51);
  const double b_emp = mc_relative_bias(spec, EstimatorTag::CccEmp, n, reps, 52);
  std::snprintf(buf, sizeof(buf),
                "bias: gaussian ccc-mle %.4f (>0.05); ccc-emp %.4f (<0.05%s)", b_mle, b_emp,
                b_emp < 0.05 ? "" : " NOT MET: treated tail exceeds the observed control "
                                    "support, truncating the empirical chain");
  detail = buf;
  return b_mle > 0.05 && b_emp < 0.05;
}

bool criterion_rate(std::string& detail) {
  const DgmSpec spec = dgm_linear();
  const std::size_t reps = 300;
  const std::vector<std::size_t> ns = {500, 1000, 2000, 4000};
  std::vector<double> log_n, log_rmse;
  for (std::size_t n : ns) {
    std::vector<double> taus(reps);
    parallel_for(reps, [&](std::size_t r) {
      taus[r] = att_triple_changes(generate(spec, n, mix_seed(61, n, r)),
                                   ChainMode::make_empirical())
                    .tau_hat;
    });
    double mse = 0.0;
    for (double t : taus) mse += (t - spec.true_tau) * (t - spec.true_tau);
    mse /= static_cast<double>(reps);
    log_n.push_back(std::log(static_cast<double>(n)));
    log_rmse.push_back(0.5 * std::log(mse));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    mx += log_n[i];
    my += log_rmse[i];
  }
  mx /= ns.size();
  my /= ns.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    sxy += (log_n[i] - mx) * (log_rmse[i] - my);
    sxx += (log_n[i] - mx) * (log_n[i] - mx);
  }
  const double slope = sxy / sxx;
  std::snprintf(buf, sizeof(buf), "log RMSE vs log n slope %.3f (target -0.5 +/- 0.15)", slope);
  detail = buf;
  return slope > -0.65 && slope < -0.35;
}

bool criterion_variance(std::string& detail) {
  const DgmSpec spec = dgm_linear();
  const std::size_t n = 4000, reps = 500;

  // Plug-in estimate of Var(tau_hat), averaged over a few tables to damp
  // table-level noise.
  double plugin_var = 0.0;
  const int n_plugin = 5;
  for (int i = 0; i < n_plugin; ++i) {
    VarianceReport rep = plugin_variance(generate(spec, n, mix_seed(71, n, i)));
    plugin_var += rep.total / static_cast<double>(rep.n_total);
  }
  plugin_var /= n_plugin;

  std::vector<double> taus(reps);
  parallel_for(reps, [&](std::size_t r) {
    taus[r] = att_triple_changes(generate(spec, n, mix_seed(72, n, r)),
                                 ChainMode::make_empirical())
                  .tau_hat;
  });
  double mean = 0.0;
  for (double t : taus) mean += t;
  mean /= static_cast<double>(reps);
  double mc_var = 0.0;
  for (double t : taus) mc_var += (t - mean) * (t - mean);
  mc_var /= static_cast<double>(reps - 1);

  const double ratio = plugin_var / mc_var;
  std::snprintf(buf, sizeof(buf), "plug-in var %.3e vs MC var %.3e, ratio %.3f (in [0.5, 2])",
                plugin_var, mc_var, ratio);
  detail = buf;
  return ratio >= 0.5 && ratio <= 2.0;
}

bool criterion_bootstrap_coverage(std::string& detail) {
  const DgmSpec spec = dgm_linear();
  const std::size_t n = 2000, outer = 300, B = 400;
  const double level = 0.90;
  EstimatorKind kind{EstimatorTag::CccEmp, spec.mle_families, State::S1};

  std::vector<char> covered(outer, 0);
  parallel_for(outer, [&](std::size_t r) {
    CellTable table = generate(spec, n, mix_seed(81, n, r));
    BootstrapReport boot = bootstrap_ci(table, kind, B, level, mix_seed(82, n, r));
    covered[r] = (boot.lo <= spec.true_tau && spec.true_tau <= boot.hi) ? 1 : 0;
  });
  std::size_t hits = 0;
  for (char c : covered) hits += c;
  const double coverage = static_cast<double>(hits) / static_cast<double>(outer);
  std::snprintf(buf, sizeof(buf), "90%% CI covered tau in %.1f%% of %zu replications (85-95)",
                100.0 * coverage, outer);
  detail = buf;
  return coverage >= 0.85 && coverage <= 0.95;
}

bool criterion_transport(std::string& detail) {
  // (a) one-dimensional pushforward vs the empirical quantile chain. The
  // treated-eligible pre-period clouds coincide with their state's control
  // pre-period clouds, so every map is queried on its own support and the
  // zero-order extension is exact there; the three post-period clouds are
  // fully generic. Off-support queries can drift by several steps per stage
  // (the extension is piecewise constant), which is a property of the
  // extension, not of the transport composition this criterion pins down.
  const std::size_t n = 200;
  RngStream fixture_rng(91);
  auto draw = [&](double mu, double sd) {
    std::vector<double> v(n);
    for (double& x : v) x = fixture_rng.normal(mu, sd);
    return v;
  };
  std::vector<double> pre_s0 = draw(0.0, 2.0);
  std::vector<double> pre_s1 = draw(-0.5, 2.0);
  CellTable table;
  table.set(CellSamples(cell_id(0, 0, 0), pre_s0));
  table.set(CellSamples(cell_id(0, 1, 0), pre_s0));
  table.set(CellSamples(cell_id(1, 0, 0), pre_s1));
  table.set(CellSamples(cell_id(1, 1, 0), pre_s1));
  table.set(CellSamples(cell_id(0, 0, 1), draw(0.4, 2.2)));
  table.set(CellSamples(cell_id(0, 1, 1), draw(1.5, 1.8)));
  table.set(CellSamples(cell_id(1, 0, 1), draw(-0.1, 2.1)));
  CloudTable clouds;
  for (CellId id : all_cells()) {
    if (id == cell_id(1, 1, 1)) continue;
    clouds.set(id, PointCloud(1, table.cell(id).values()));
  }
  PointCloud out = triple_changes_pushforward(clouds, OtMethod::exact());
  const ChainSpec chain = triple_changes_map_chain();
  EmpiricalCdf final_target(table.cell(cell_id(0, 1, 1)));
  std::size_t max_rank_gap = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = table.cell(cell_id(1, 1, 0)).values()[i];
    const double via_chain = compose_chain(chain, table, x);
    const double via_ot = out.point(i)[0];
    const double rank_gap =
        std::fabs(final_target.cdf(via_ot) - final_target.cdf(via_chain)) * static_cast<double>(n);
    max_rank_gap = std::max(max_rank_gap, static_cast<std::size_t>(std::lround(rank_gap)));
  }
  if (max_rank_gap > 1) {
    std::snprintf(buf, sizeof(buf), "pushforward drifted %zu quantile steps from the chain",
                  max_rank_gap);
    detail = buf;
    return false;
  }

  // (b) exact assignment vs factorial brute force.
  RngStream rng(92);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 2 + rng.index(5);
    const std::size_t d = 1 + rng.index(3);
    PointCloud a = oracle::random_cloud(rng, m, d);
    PointCloud b = oracle::random_cloud(rng, m, d, 0.6);
    BrenierMapApprox map = exact_assignment_map(a, b);
    double cost = 0.0;
    for (std::size_t i = 0; i < m; ++i) cost += squared_distance(a.point(i), map.images.point(i));
    if (std::fabs(cost - oracle::brute_force_assignment_cost(a, b)) > 1e-12) {
      detail = "assignment disagreed with brute force";
      return false;
    }
  }

  // (c) Sinkhorn marginals.
  PointCloud a = oracle::random_cloud(rng, 40, 2);
  PointCloud b = oracle::random_cloud(rng, 50, 2, 0.5);
  TransportPlan plan = sinkhorn_plan(a, b, default_sinkhorn_reg(a, b), 10000, 1e-8);
  double worst = 0.0;
  for (std::size_t i = 0; i < plan.n_source; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < plan.n_target; ++j) row += plan.mass(i, j);
    worst = std::max(worst, std::fabs(row - 1.0 / 40.0));
  }
  for (std::size_t j = 0; j < plan.n_target; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < plan.n_source; ++i) col += plan.mass(i, j);
    worst = std::max(worst, std::fabs(col - 1.0 / 50.0));
  }
  if (!(plan.converged && worst <= 1e-6)) {
    std::snprintf(buf, sizeof(buf), "sinkhorn marginal violation %.2e", worst);
    detail = buf;
    return false;
  }

  std::snprintf(buf, sizeof(buf),
                "1-d rank gap <= %zu step; assignment == brute force; marginals %.1e", max_rank_gap,
                worst);
  detail = buf;
  return true;
}

bool criterion_joint(std::string& detail) {
  const std::size_t n = 2000;
  RngStream rng(2010);

  // Panel with a strictly monotone within-unit transition.
  PanelPairs pairs;
  std::vector<double> t0_values(n), t1_values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y0 = rng.normal(1.0, 1.0);
    const double y1 = 2.0 + 0.5 * y0 + 0.1 * y0 * y0 * y0;
    t0_values[i] = y0;
    t1_values[i] = y1;
    pairs.pairs.emplace_back(y0, y1);
  }

  CellTable table = generate(dgm_linear(), n, 93);
  CellTable with_panel;
  for (CellId id : all_cells()) {
    if (id == cell_id(1, 1, 0) || id == cell_id(1, 1, 1)) continue;
    with_panel.set(CellSamples(id, table.cell(id).values()));
  }
  with_panel.set(CellSamples(cell_id(1, 1, 0), t0_values));
  with_panel.set(CellSamples(cell_id(1, 1, 1), t1_values));

  EmpiricalCdf marginal_t0(with_panel.cell(cell_id(1, 1, 0)));
  EmpiricalCdf marginal_t1(with_panel.cell(cell_id(1, 1, 1)));
  auto marginal = [&](double y) { return triple_changes_counterfactual_cdf(with_panel, y); };

  const double step = 1.0 / static_cast<double>(n) + 1e-12;
  const double huge_y = 1e12;
  double worst0 = 0.0, worst1 = 0.0;
  for (int k = 0; k <= 40; ++k) {
    const double y = -4.0 + 8.0 * k / 40.0;
    // y1 saturated: the y0 marginal must reproduce the point-identified one.
    const double p0 = joint_counterfactual_cdf(pairs, marginal, marginal_t0, y, huge_y);
    worst0 = std::max(worst0, std::fabs(p0 - marginal(y)));
    // y0 saturated: the y1 marginal must be the empirical one.
    const double y1 = 2.0 + 0.5 * y + 0.1 * y * y * y;
    const double p1 = joint_counterfactual_cdf(pairs, marginal, marginal_t0, huge_y, y1);
    worst1 = std::max(worst1, std::fabs(p1 - marginal_t1.cdf(y1)));
  }
  std::snprintf(buf, sizeof(buf),
                "marginal gaps: counterfactual %.2e, post-period %.2e (step %.2e)", worst0, worst1,
                step);
  detail = buf;
  return worst0 <= step && worst1 <= step;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "chain evaluation equals nested definitions bitwise", 5, criterion_oracle_equivalence},
      {2, "bounds collapse at zero slack and nest", 5, criterion_bound_collapse},
      {3, "linear mechanism: ccc/ddd consistent, did/cic biased", 180, criterion_linear_dgm},
      {4, "nonlinear mechanism: ddd biased, ccc-mle consistent", 180, criterion_nonlinear_dgm},
      {5, "misspecified mle biased, empirical robust", 180, criterion_misspecified_mle},
      {6, "root-n convergence rate", 300, criterion_rate},
      {7, "plug-in variance tracks Monte Carlo variance", 300, criterion_variance},
      {8, "bootstrap interval coverage", 600, criterion_bootstrap_coverage},
      {9, "transport pushforward consistency", 60, criterion_transport},
      {10, "joint counterfactual marginals", 60, criterion_joint},
  };

  int failures = 0;
  for (auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.budget_seconds) {
      ok = false;
      detail += " [over time budget]";
    }
    std::printf("[%s] %2d. %s — %s (%.1fs)\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                detail.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures;
}
