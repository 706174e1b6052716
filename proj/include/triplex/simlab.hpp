#ifndef TRIPLEX_SIMLAB_HPP_
#define TRIPLEX_SIMLAB_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "triplex/cells.hpp"
#include "triplex/estimators.hpp"

namespace triplex {

// Latent law of one (state, group) cohort.
struct LatentLaw {
  enum class Kind { Gaussian, Exponential } kind = Kind::Gaussian;
  double mean = 0.0;  // gaussian mean
  double sd = 1.0;    // gaussian sd
  double rate = 1.0;  // exponential rate

  static LatentLaw gaussian(double mean, double sd) {
    return {Kind::Gaussian, mean, sd, 0.0};
  }
  static LatentLaw exponential(double rate) { return {Kind::Exponential, 0.0, 0.0, rate}; }

  double draw(class RngStream& rng) const;
  double mean_value() const;
};

// Production function mapping the latent variable to the untreated outcome of
// one cell: either linear 2u + c*t or the log-scale variant 0.1*exp(2u + c*t).
struct Production {
  bool explog = false;
  double shift = 0.0;  // the c*t term, already evaluated at the cell's time

  double apply(double u) const;
};

// A synthetic data-generating mechanism with a closed-form ground-truth ATT.
struct DgmSpec {
  std::string name;
  std::array<LatentLaw, 4> latent;      // indexed by 2*s + d
  std::array<Production, 8> production;  // indexed by CellId::index(), except (s1,d1,t1)
  LatentLaw treated_outcome;             // observed (s1,d1,t1) law
  double true_tau = 0.0;
  FamilyMap mle_families;  // the family assignment the MLE variants use on this mechanism

  const LatentLaw& latent_for(CellId id) const {
    return latent[static_cast<std::size_t>(id.s) * 2 + static_cast<std::size_t>(id.d)];
  }
};

// The linear gaussian mechanism: latent means (0, 0.25, -0.25, 0.5) with unit
// sd, linear production 2u + ((1+s)/4 + (d-0.5)/2) t, treated outcome
// N(2.75, 1). Ground truth tau = 1.
DgmSpec dgm_linear();

// The nonlinear variant: latent means (0, 0.25, -0.25, -0.5), sds
// (1, 1, 1, 1.25); the post-period production of both d1 cohorts switches to
// 0.1*exp(2u + c); treated outcome N(10, 1). Ground truth from the lognormal
// moment formula.
DgmSpec dgm_nonlinear();

// Exponential latents (rates 1, 2, 3, 1) with linear production, treated
// outcome Exp(4/15); the MLE variants deliberately keep gaussian families, so
// they are misspecified on this mechanism. Ground truth tau = 1.
DgmSpec dgm_exponential_misspec();

std::optional<DgmSpec> dgm_from_name(const std::string& name);

// Draws n outcomes per cell. Every (cell, table) combination uses its own
// stream derived from the seed, so regeneration is reproducible and cells are
// independent.
CellTable generate(const DgmSpec& spec, std::size_t n_per_cell, std::uint64_t seed);

struct SimRow {
  std::string spec;
  std::string estimator;
  std::size_t n = 0;
  std::size_t reps = 0;
  double mean_rel_bias = 0.0;  // mean over replications of |1 - tau_hat/tau|
  double sd = 0.0;             // spread of the per-replication values
};

struct SimReport {
  std::vector<SimRow> rows;
  std::uint64_t seed = 0;

  std::string to_csv() const;
  std::string to_json() const;
};

// Monte Carlo grid of the relative-bias metric |1 - tau_hat/tau|: for every
// (spec, estimator, n) cell, reps independent tables are generated and the
// estimator recomputed. Row order and values are independent of scheduling.
SimReport relative_bias_experiment(const std::vector<DgmSpec>& specs,
                                   const std::vector<EstimatorTag>& estimators,
                                   const std::vector<std::size_t>& n_grid, std::size_t reps,
                                   std::uint64_t seed);

}  // namespace triplex

#endif  // TRIPLEX_SIMLAB_HPP_
