#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "oracles.hpp"
#include "triplex/simlab.hpp"

using namespace triplex;

namespace {

double cell_mean(const CellTable& t, CellId id) { return t.cell(id).mean(); }

// Monte Carlo estimate of the mean counterfactual outcome of the treated
// cohort, straight from the mechanism's latent law and production function.
double mc_counterfactual_mean(const DgmSpec& spec, std::size_t draws, std::uint64_t seed) {
  RngStream rng(seed, {0xabcdULL});
  const LatentLaw& law = spec.latent_for(cell_id(1, 1, 0));
  const Production& prod = spec.production[cell_id(1, 1, 1).index()];
  double sum = 0.0;
  for (std::size_t i = 0; i < draws; ++i) sum += prod.apply(law.draw(rng));
  return sum / static_cast<double>(draws);
}

}  // namespace

TEST_CASE("linear mechanism closed forms") {
  DgmSpec spec = dgm_linear();
  CHECK(spec.true_tau == 1.0);
  CHECK(spec.treated_outcome.mean == 2.75);

  // Production means at the latent means (everything is linear).
  CHECK(spec.production[cell_id(0, 0, 0).index()].apply(0.0) == 0.0);
  CHECK(spec.production[cell_id(0, 0, 1).index()].apply(0.0) == 0.0);
  CHECK(spec.production[cell_id(1, 0, 1).index()].apply(-0.25) == -0.25);
  CHECK(spec.production[cell_id(0, 1, 1).index()].apply(0.25) == 1.0);
  CHECK(spec.production[cell_id(1, 1, 1).index()].apply(0.5) == 1.75);

  const double mc = 2.75 - mc_counterfactual_mean(spec, 10'000'000, 2024);
  CHECK(std::fabs(mc - spec.true_tau) < 0.01);
}

TEST_CASE("nonlinear mechanism closed forms") {
  DgmSpec spec = dgm_nonlinear();
  CHECK(spec.treated_outcome.mean == 10.0);
  CHECK(spec.latent_for(cell_id(1, 1, 0)).sd == 1.25);
  CHECK(spec.true_tau == 10.0 - 0.1 * std::exp(0.75 - 1.0 + 2.0 * 1.25 * 1.25));

  SUBCASE("closed form against seeded Monte Carlo") {
    // The integrand is heavy-tailed (lognormal with log-sd 2.5), so 1e7 draws
    // have a standard error near the tolerance; the seed is pinned and the
    // stratified quadrature below provides the tight check.
    const double mc = 10.0 - mc_counterfactual_mean(spec, 10'000'000, 42);
    CHECK(std::fabs(mc - spec.true_tau) < 0.01);
  }
  SUBCASE("closed form against stratified quadrature") {
    // Midpoint rule on the latent quantile scale; deterministic and far
    // tighter than sampling noise on this heavy-tailed integrand.
    const LatentLaw& law = spec.latent_for(cell_id(1, 1, 0));
    const Production& prod = spec.production[cell_id(1, 1, 1).index()];
    const std::size_t grid = 20'000'000;
    double sum = 0.0;
    for (std::size_t i = 0; i < grid; ++i) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
      sum += prod.apply(law.mean + law.sd * standard_normal_quantile(u));
    }
    const double quad_tau = 10.0 - sum / static_cast<double>(grid);
    CHECK(std::fabs(quad_tau - spec.true_tau) < 0.005);
  }
}

TEST_CASE("exponential mechanism closed forms") {
  DgmSpec spec = dgm_exponential_misspec();
  CHECK(spec.latent_for(cell_id(1, 0, 0)).rate == 3.0);
  CHECK(spec.treated_outcome.rate == 4.0 / 15.0);
  CHECK(1.0 / spec.treated_outcome.rate == 3.75);
  CHECK(spec.true_tau == 1.0);

  const double mc = 3.75 - mc_counterfactual_mean(spec, 10'000'000, 2024);
  CHECK(std::fabs(mc - spec.true_tau) < 0.01);
}

TEST_CASE("generation is deterministic and respects the mechanism") {
  DgmSpec spec = dgm_linear();

  SUBCASE("same seed, same table") {
    CellTable a = generate(spec, 200, 42);
    CellTable b = generate(spec, 200, 42);
    for (CellId id : all_cells()) {
      REQUIRE(a.cell(id).size() == b.cell(id).size());
      for (std::size_t i = 0; i < a.cell(id).size(); ++i)
        CHECK(a.cell(id).values()[i] == b.cell(id).values()[i]);
    }
    CellTable c = generate(spec, 200, 43);
    CHECK(c.cell(cell_id(0, 0, 0)).values()[0] != a.cell(cell_id(0, 0, 0)).values()[0]);
  }

  SUBCASE("large-sample cell means match the closed forms") {
    CellTable t = generate(spec, 1'000'000, 7);
    CHECK(std::fabs(cell_mean(t, cell_id(0, 0, 1)) - 0.0) < 0.01);
    CHECK(std::fabs(cell_mean(t, cell_id(1, 0, 1)) - (-0.25)) < 0.01);
    CHECK(std::fabs(cell_mean(t, cell_id(0, 1, 1)) - 1.0) < 0.01);
    CHECK(std::fabs(cell_mean(t, cell_id(1, 1, 0)) - 1.0) < 0.01);
    CHECK(std::fabs(cell_mean(t, cell_id(1, 1, 1)) - 2.75) < 0.01);
  }

  SUBCASE("exponential mechanism produces nonnegative control outcomes at t0") {
    CellTable t = generate(dgm_exponential_misspec(), 5000, 3);
    CHECK(t.cell(cell_id(0, 0, 0)).min() >= 0.0);
    CHECK(t.cell(cell_id(1, 0, 0)).min() >= 0.0);
  }

  SUBCASE("tiny cells are rejected") {
    CHECK_THROWS_AS(generate(spec, 1, 1), Error);
  }
}

TEST_CASE("relative bias experiment") {
  SUBCASE("single-replication row reproduces the metric formula") {
    DgmSpec spec = dgm_linear();
    SimReport report =
        relative_bias_experiment({spec}, {EstimatorTag::Ddd}, {300}, 1, 99);
    REQUIRE(report.rows.size() == 1);
    CellTable t = generate(spec, 300, mix_seed(99, 0 * 100000 + 300, 0));
    const double tau_hat = att_ddd(t).tau_hat;
    CHECK(report.rows[0].mean_rel_bias == std::fabs(1.0 - tau_hat / spec.true_tau));
    CHECK(report.rows[0].sd == 0.0);
  }

  SUBCASE("row grid is complete and deterministically ordered") {
    SimReport report = relative_bias_experiment(
        {dgm_linear()}, {EstimatorTag::Did, EstimatorTag::Ddd, EstimatorTag::CicEmp,
                         EstimatorTag::CccEmp},
        {100, 200}, 4, 11);
    REQUIRE(report.rows.size() == 8);
    CHECK(report.rows[0].estimator == "did");
    CHECK(report.rows[0].n == 100);
    CHECK(report.rows[4].n == 200);
    for (const SimRow& r : report.rows) {
      CHECK(r.reps == 4);
      CHECK(r.mean_rel_bias >= 0.0);
    }
    const std::string csv = report.to_csv();
    CHECK(csv.rfind("spec,estimator,n,reps,mean_rel_bias,sd\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);  // header + 8 rows
  }

  SUBCASE("results do not depend on the thread budget") {
    SimReport serial, threaded;
    setenv("TRIPLEX_THREADS", "1", 1);
    serial = relative_bias_experiment({dgm_linear()}, {EstimatorTag::CccEmp}, {150}, 6, 5);
    setenv("TRIPLEX_THREADS", "4", 1);
    threaded = relative_bias_experiment({dgm_linear()}, {EstimatorTag::CccEmp}, {150}, 6, 5);
    unsetenv("TRIPLEX_THREADS");
    REQUIRE(serial.rows.size() == threaded.rows.size());
    CHECK(serial.rows[0].mean_rel_bias == threaded.rows[0].mean_rel_bias);
    CHECK(serial.rows[0].sd == threaded.rows[0].sd);
  }

  SUBCASE("biased and consistent estimators separate on the linear mechanism") {
    SimReport report = relative_bias_experiment(
        {dgm_linear()}, {EstimatorTag::Did, EstimatorTag::CccEmp}, {2000}, 20, 31);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].mean_rel_bias > 0.3);   // did sits near 0.5
    CHECK(report.rows[1].mean_rel_bias < 0.15);  // ccc is consistent
  }

  SUBCASE("zero true tau is rejected") {
    DgmSpec spec = dgm_linear();
    spec.true_tau = 0.0;
    CHECK_THROWS_AS(
        relative_bias_experiment({spec}, {EstimatorTag::Ddd}, {100}, 2, 1), Error);
  }
}
