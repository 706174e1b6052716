#ifndef TRIPLEX_ESTIMATORS_HPP_
#define TRIPLEX_ESTIMATORS_HPP_

#include <array>
#include <optional>
#include <string>

#include "triplex/cells.hpp"
#include "triplex/parametric.hpp"

namespace triplex {

enum class EstimatorTag { Did, Ddd, CicEmp, CicMle, CccEmp, CccMle };

std::string estimator_name(EstimatorTag tag);
std::optional<EstimatorTag> estimator_from_name(const std::string& name);
bool estimator_is_mle(EstimatorTag tag);

// Fully specified estimator: the tag, the per-cell family assignment for the
// MLE variants, and the state whose cells the single-state estimators
// (DiD, changes-in-changes) are run on. The treated state is the default: it
// is the estimator a practitioner ignoring the second state would run.
struct EstimatorKind {
  EstimatorTag tag = EstimatorTag::CccEmp;
  FamilyMap families;
  State single_state = State::S1;
};

struct AttEstimate {
  double tau_hat = 0.0;
  EstimatorTag tag = EstimatorTag::CccEmp;
  std::array<std::size_t, 8> n_per_cell{};  // zero for cells the estimator did not use
};

// Mode selector for the estimators that compose CDF/quantile links: either
// the exact empirical step functions or closed-form fitted families. The two
// are never mixed within one chain.
struct ChainMode {
  bool empirical = true;
  FamilyMap families;

  static ChainMode make_empirical() { return {true, FamilyMap()}; }
  static ChainMode mle(FamilyMap f) { return {false, std::move(f)}; }
};

// Triple-changes ATT: mean treated post-period outcome minus the mean of the
// six-link counterfactual map applied to the treated pre-period samples.
AttEstimate att_triple_changes(const CellTable& table, const ChainMode& mode);

// Changes-in-changes ATT within one state.
AttEstimate att_cic(const CellTable& table, State s, const ChainMode& mode);

// Difference-in-differences within one state, and the triple difference
// DiD(s1) - DiD(s0). Plain cell-mean arithmetic.
AttEstimate att_did(const CellTable& table, State s);
AttEstimate att_ddd(const CellTable& table);

// Dispatch on a fully specified kind.
AttEstimate estimate_att(const CellTable& table, const EstimatorKind& kind);

}  // namespace triplex

#endif  // TRIPLEX_ESTIMATORS_HPP_
