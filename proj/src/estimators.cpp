#include "triplex/estimators.hpp"

#include <cmath>
#include <vector>

#include "triplex/empirical.hpp"

namespace triplex {

std::string estimator_name(EstimatorTag tag) {
  switch (tag) {
    case EstimatorTag::Did: return "did";
    case EstimatorTag::Ddd: return "ddd";
    case EstimatorTag::CicEmp: return "cic-emp";
    case EstimatorTag::CicMle: return "cic-mle";
    case EstimatorTag::CccEmp: return "ccc-emp";
    case EstimatorTag::CccMle: return "ccc-mle";
  }
  return "?";
}

std::optional<EstimatorTag> estimator_from_name(const std::string& name) {
  if (name == "did") return EstimatorTag::Did;
  if (name == "ddd") return EstimatorTag::Ddd;
  if (name == "cic-emp") return EstimatorTag::CicEmp;
  if (name == "cic-mle") return EstimatorTag::CicMle;
  if (name == "ccc-emp") return EstimatorTag::CccEmp;
  if (name == "ccc-mle") return EstimatorTag::CccMle;
  return std::nullopt;
}

bool estimator_is_mle(EstimatorTag tag) {
  return tag == EstimatorTag::CicMle || tag == EstimatorTag::CccMle;
}

namespace {

// Applies a cdf/quantile link sequence (outermost first, as in ChainSpec) to
// ascending inputs. Empirical links run as merge passes over the sorted
// vectors; MLE links evaluate the fitted closed forms pointwise. Outputs stay
// ascending because every link is nondecreasing.
std::vector<double> run_chain_sorted(const CellTable& table, const ChainSpec& chain,
                                     const ChainMode& mode, std::vector<double> values) {
  std::vector<double> next;
  for (auto it = chain.links.rbegin(); it != chain.links.rend(); ++it) {
    const CellSamples& cell = table.cell(it->cell);
    if (mode.empirical) {
      EmpiricalCdf dist(cell);
      if (it->kind == LinkKind::Cdf)
        dist.cdf_sorted(values, next);
      else
        dist.quantile_sorted(values, next);
      values.swap(next);
    } else {
      FittedDist dist = fit_parametric(cell, mode.families.at(it->cell));
      if (it->kind == LinkKind::Cdf)
        for (double& v : values) v = dist.cdf(v);
      else
        for (double& v : values) v = dist.quantile(v);
    }
  }
  return values;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

AttEstimate finish(double tau, EstimatorTag tag, const CellTable& table,
                   std::initializer_list<CellId> used) {
  if (!std::isfinite(tau))
    throw Error(Errc::NonFinite, "estimator " + estimator_name(tag) + " produced " +
                                     std::to_string(tau));
  AttEstimate est;
  est.tau_hat = tau;
  est.tag = tag;
  for (CellId id : used) est.n_per_cell[id.index()] = table.cell(id).size();
  return est;
}

}  // namespace

AttEstimate att_triple_changes(const CellTable& table, const ChainMode& mode) {
  table.require_all_cells();
  const CellSamples& treated_post = table.cell(cell_id(1, 1, 1));
  const CellSamples& treated_pre = table.cell(cell_id(1, 1, 0));

  std::vector<double> mapped =
      run_chain_sorted(table, triple_changes_map_chain(), mode, treated_pre.values());
  const double tau = treated_post.mean() - mean_of(mapped);

  return finish(tau, mode.empirical ? EstimatorTag::CccEmp : EstimatorTag::CccMle, table,
                {cell_id(0, 0, 0), cell_id(0, 0, 1), cell_id(0, 1, 0), cell_id(0, 1, 1),
                 cell_id(1, 0, 0), cell_id(1, 0, 1), cell_id(1, 1, 0), cell_id(1, 1, 1)});
}

AttEstimate att_cic(const CellTable& table, State s, const ChainMode& mode) {
  const int si = static_cast<int>(s);
  const CellSamples& treated_post = table.cell(cell_id(si, 1, 1));
  const CellSamples& treated_pre = table.cell(cell_id(si, 1, 0));

  std::vector<double> mapped =
      run_chain_sorted(table, cic_map_chain(s), mode, treated_pre.values());
  const double tau = treated_post.mean() - mean_of(mapped);

  return finish(tau, mode.empirical ? EstimatorTag::CicEmp : EstimatorTag::CicMle, table,
                {cell_id(si, 0, 0), cell_id(si, 0, 1), cell_id(si, 1, 0), cell_id(si, 1, 1)});
}

AttEstimate att_did(const CellTable& table, State s) {
  const int si = static_cast<int>(s);
  const double d1_change =
      table.cell(cell_id(si, 1, 1)).mean() - table.cell(cell_id(si, 1, 0)).mean();
  const double d0_change =
      table.cell(cell_id(si, 0, 1)).mean() - table.cell(cell_id(si, 0, 0)).mean();
  return finish(d1_change - d0_change, EstimatorTag::Did, table,
                {cell_id(si, 0, 0), cell_id(si, 0, 1), cell_id(si, 1, 0), cell_id(si, 1, 1)});
}

AttEstimate att_ddd(const CellTable& table) {
  const double did_s1 = att_did(table, State::S1).tau_hat;
  const double did_s0 = att_did(table, State::S0).tau_hat;
  return finish(did_s1 - did_s0, EstimatorTag::Ddd, table,
                {cell_id(0, 0, 0), cell_id(0, 0, 1), cell_id(0, 1, 0), cell_id(0, 1, 1),
                 cell_id(1, 0, 0), cell_id(1, 0, 1), cell_id(1, 1, 0), cell_id(1, 1, 1)});
}

AttEstimate estimate_att(const CellTable& table, const EstimatorKind& kind) {
  switch (kind.tag) {
    case EstimatorTag::Did: return att_did(table, kind.single_state);
    case EstimatorTag::Ddd: return att_ddd(table);
    case EstimatorTag::CicEmp:
      return att_cic(table, kind.single_state, ChainMode::make_empirical());
    case EstimatorTag::CicMle:
      return att_cic(table, kind.single_state, ChainMode::mle(kind.families));
    case EstimatorTag::CccEmp: return att_triple_changes(table, ChainMode::make_empirical());
    case EstimatorTag::CccMle: return att_triple_changes(table, ChainMode::mle(kind.families));
  }
  throw Error(Errc::BadInput, "unknown estimator");
}

}  // namespace triplex
