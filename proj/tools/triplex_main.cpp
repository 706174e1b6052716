// Command-line front end for the triple-changes estimation library: CSV
// ingestion, point estimation with bootstrap intervals, partial-identification
// bounds, plug-in variance reports, the joint counterfactual, synthetic-data
// experiments, and the optimal-transport pushforward for multivariate
// outcomes.
//
// Exit codes: 0 success, 2 input/schema error, 3 computation error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "triplex/bootstrap.hpp"
#include "triplex/io.hpp"
#include "triplex/math.hpp"
#include "triplex/simlab.hpp"
#include "triplex/variance.hpp"

using json = nlohmann::ordered_json;
using namespace triplex;

namespace {

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::BadInput:
    case Errc::MissingCell:
    case Errc::NegativeSlack:
    case Errc::DimensionMismatch:
    case Errc::SizeMismatch:
    case Errc::EmptyPanel:
      return 2;
    default:
      return 3;
  }
}

struct OutputOptions {
  std::string format = "json";
  std::string out_path;
};

void add_output_flags(CLI::App* cmd, OutputOptions& opts) {
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd->add_option("--out", opts.out_path, "Write the report to this path (default: stdout)");
}

void emit(const OutputOptions& opts, const std::string& payload) {
  if (opts.out_path.empty()) {
    std::cout << payload;
    if (!payload.empty() && payload.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(opts.out_path, std::ios::binary);
  if (!out) throw Error(Errc::BadInput, "cannot write to " + opts.out_path);
  out << payload;
}

std::vector<double> parse_grid(const std::string& text) {
  double lo = 0.0, hi = 0.0;
  std::size_t steps = 0;
  char c1 = 0, c2 = 0;
  std::istringstream ss(text);
  if (!(ss >> lo >> c1 >> hi >> c2 >> steps) || c1 != ':' || c2 != ':' || steps == 0 ||
      !(ss >> std::ws).eof())
    throw Error(Errc::BadInput, "grid must be lo:hi:steps, got '" + text + "'");
  std::vector<double> grid(steps);
  for (std::size_t i = 0; i < steps; ++i)
    grid[i] = steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) /
                                     static_cast<double>(steps - 1);
  return grid;
}

EstimatorKind make_kind(const std::string& estimator, const std::string& family,
                        const std::string& state) {
  auto tag = estimator_from_name(estimator);
  if (!tag) throw Error(Errc::BadInput, "unknown estimator '" + estimator + "'");
  auto fam = family_from_name(family);
  if (!fam) throw Error(Errc::BadInput, "unknown family '" + family + "'");
  EstimatorKind kind;
  kind.tag = *tag;
  kind.families = FamilyMap::uniform(*fam);
  kind.single_state = state == "s0" ? State::S0 : State::S1;
  if (state != "s0" && state != "s1")
    throw Error(Errc::BadInput, "state must be s0 or s1, got '" + state + "'");
  return kind;
}

json n_per_cell_json(const CellTable& table) {
  json out = json::object();
  for (CellId id : all_cells())
    if (table.has(id)) out[cell_name(id)] = table.cell(id).size();
  return out;
}

// ---- estimate -------------------------------------------------------------

struct EstimateArgs {
  std::string data_path;
  std::string estimator = "ccc-emp";
  std::string family = "gaussian";
  std::string state = "s1";
  std::size_t bootstrap_b = 1000;
  double level = 0.90;
  std::uint64_t seed = 0;
  bool joint = false;
  std::string grid;
  OutputOptions output;
};

int run_joint(const DataFile& data, const EstimateArgs& args);

int run_estimate(const EstimateArgs& args) {
  DataFile data = read_data_file(args.data_path);
  if (args.joint) return run_joint(data, args);

  data.table.require_all_cells();
  EstimatorKind kind = make_kind(args.estimator, args.family, args.state);
  AttEstimate est = estimate_att(data.table, kind);

  std::optional<VarianceReport> var;
  if (kind.tag == EstimatorTag::CccEmp) {
    try {
      var = plugin_variance(data.table);
    } catch (const Error&) {
      // Degenerate or support-mismatched cells: report the point estimate
      // without a plug-in se rather than failing the whole run.
    }
  }

  std::optional<BootstrapReport> boot;
  if (args.bootstrap_b > 0)
    boot = bootstrap_ci(data.table, kind, args.bootstrap_b, args.level, args.seed);

  json report;
  report["schema_version"] = 1;
  report["estimator"] = estimator_name(kind.tag);
  if (estimator_is_mle(kind.tag)) report["family"] = args.family;
  if (kind.tag == EstimatorTag::Did || kind.tag == EstimatorTag::CicEmp ||
      kind.tag == EstimatorTag::CicMle)
    report["state"] = args.state;
  report["tau_hat"] = est.tau_hat;
  if (var) {
    report["se"] = var->se;
    const double z = standard_normal_quantile(1.0 - (1.0 - args.level) / 2.0);
    report["normal_lo"] = est.tau_hat - z * var->se;
    report["normal_hi"] = est.tau_hat + z * var->se;
  } else {
    report["se"] = nullptr;
  }
  if (boot) {
    report["ci_lo"] = boot->lo;
    report["ci_hi"] = boot->hi;
  } else {
    report["ci_lo"] = nullptr;
    report["ci_hi"] = nullptr;
  }
  report["B"] = args.bootstrap_b;
  report["level"] = args.level;
  report["seed"] = args.seed;
  report["n_per_cell"] = n_per_cell_json(data.table);

  if (args.output.format == "json") {
    emit(args.output, report.dump(2));
  } else {
    std::ostringstream csv;
    csv << "estimator,tau_hat,se,ci_lo,ci_hi,B,level,seed\n";
    csv << report["estimator"].get<std::string>() << ',' << est.tau_hat << ','
        << (var ? std::to_string(var->se) : "") << ',' << (boot ? std::to_string(boot->lo) : "")
        << ',' << (boot ? std::to_string(boot->hi) : "") << ',' << args.bootstrap_b << ','
        << args.level << ',' << args.seed << '\n';
    emit(args.output, csv.str());
  }
  return 0;
}

// ---- joint ----------------------------------------------------------------

int run_joint(const DataFile& data, const EstimateArgs& args) {
  data.table.require_chain_cells();
  if (!data.treated_pairs)
    throw Error(Errc::EmptyPanel,
                "joint estimand needs id-linked (s1,d1) rows at both times; "
                "none found (is the id column present?)");
  if (args.grid.empty()) throw Error(Errc::BadInput, "--grid is required for the joint estimand");
  const std::vector<double> grid = parse_grid(args.grid);

  std::vector<double> t0_values;
  t0_values.reserve(data.treated_pairs->pairs.size());
  for (const auto& [a, b] : data.treated_pairs->pairs) t0_values.push_back(a);
  CellSamples t0_cell(cell_id(1, 1, 0), std::move(t0_values));
  EmpiricalCdf marginal_t0(t0_cell);

  auto marginal = [&](double y) { return triple_changes_counterfactual_cdf(data.table, y); };

  json rows = json::array();
  std::ostringstream csv;
  csv << "y0,y1,p\n";
  for (double y0 : grid) {
    for (double y1 : grid) {
      const double p =
          joint_counterfactual_cdf(*data.treated_pairs, marginal, marginal_t0, y0, y1);
      rows.push_back(json{{"y0", y0}, {"y1", y1}, {"p", p}});
      csv << y0 << ',' << y1 << ',' << p << '\n';
    }
  }

  if (args.output.format == "json") {
    json report;
    report["schema_version"] = 1;
    report["pairs"] = data.treated_pairs->pairs.size();
    report["rows"] = rows;
    emit(args.output, report.dump(2));
  } else {
    emit(args.output, csv.str());
  }
  return 0;
}

// ---- bounds ---------------------------------------------------------------

struct BoundsArgs {
  std::string data_path;
  double eps = 0.0;
  double delta = 0.0;
  std::string grid;
  OutputOptions output;
};

int run_bounds(const BoundsArgs& args) {
  DataFile data = read_data_file(args.data_path);
  data.table.require_chain_cells();
  const std::vector<double> grid = parse_grid(args.grid);

  json rows = json::array();
  std::ostringstream csv;
  csv << "y,lower,upper\n";
  for (double y : grid) {
    BoundsResult b = partial_bounds_triple(data.table, y, args.eps, args.delta);
    rows.push_back(json{{"y", y}, {"lower", b.lower}, {"upper", b.upper}});
    csv << y << ',' << b.lower << ',' << b.upper << '\n';
  }

  if (args.output.format == "json") {
    json report;
    report["schema_version"] = 1;
    report["eps"] = args.eps;
    report["delta"] = args.delta;
    report["rows"] = rows;
    emit(args.output, report.dump(2));
  } else {
    emit(args.output, csv.str());
  }
  return 0;
}

// ---- variance -------------------------------------------------------------

int run_variance(const std::string& data_path, const OutputOptions& output) {
  DataFile data = read_data_file(data_path);
  data.table.require_all_cells();
  VarianceReport var = plugin_variance(data.table);

  if (output.format == "json") {
    json report;
    report["schema_version"] = 1;
    json v = json::object(), p = json::object();
    const auto order = variance_cell_order();
    for (std::size_t k = 0; k < 8; ++k) {
      v["V" + std::to_string(k)] = var.v[k];
      p[cell_name(order[k])] = var.p_weights[k];
    }
    report["V"] = v;
    report["p_weights"] = p;
    report["total"] = var.total;
    report["se"] = var.se;
    report["n_total"] = var.n_total;
    emit(output, report.dump(2));
  } else {
    std::ostringstream csv;
    csv << "k,cell,V,p_weight\n";
    const auto order = variance_cell_order();
    for (std::size_t k = 0; k < 8; ++k)
      csv << k << ',' << cell_name(order[k]) << ',' << var.v[k] << ',' << var.p_weights[k] << '\n';
    csv << "total,," << var.total << ",\n";
    csv << "se,," << var.se << ",\n";
    emit(output, csv.str());
  }
  return 0;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string dgm = "linear";
  std::string estimators = "did,ddd,cic-emp,ccc-emp";
  std::string n_grid = "1000,4000";
  std::size_t reps = 50;
  std::uint64_t seed = 0;
  OutputOptions output;
};

int run_simulate(const SimulateArgs& args) {
  auto spec = dgm_from_name(args.dgm);
  if (!spec) throw Error(Errc::BadInput, "unknown dgm '" + args.dgm + "'");

  std::vector<EstimatorTag> tags;
  {
    std::istringstream ss(args.estimators);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto tag = estimator_from_name(item);
      if (!tag) throw Error(Errc::BadInput, "unknown estimator '" + item + "'");
      tags.push_back(*tag);
    }
  }
  std::vector<std::size_t> ns;
  {
    std::istringstream ss(args.n_grid);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        ns.push_back(std::stoul(item));
      } catch (...) {
        throw Error(Errc::BadInput, "bad n grid entry '" + item + "'");
      }
    }
  }
  if (tags.empty() || ns.empty())
    throw Error(Errc::BadInput, "need at least one estimator and one n");

  SimReport report = relative_bias_experiment({*spec}, tags, ns, args.reps, args.seed);
  emit(args.output, args.output.format == "json" ? report.to_json() : report.to_csv());
  return 0;
}

// ---- ot ---------------------------------------------------------------------

struct OtArgs {
  std::string cloud_dir;
  std::string method = "exact";
  double reg = 0.0;
  OutputOptions output;
};

int run_ot(const OtArgs& args) {
  CloudTable clouds;
  for (CellId id : all_cells()) {
    if (id == cell_id(1, 1, 1)) continue;
    clouds.set(id, read_cloud_file(args.cloud_dir + "/" + cell_name(id) + ".txt"));
  }
  OtMethod method =
      args.method == "sinkhorn" ? OtMethod::sinkhorn(args.reg) : OtMethod::exact();
  PointCloud result = triple_changes_pushforward(clouds, method);

  std::ostringstream out;
  write_cloud(out, result);
  emit(args.output, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"triplex: distributional treatment effects from two-state, two-group, "
               "two-period designs"};
  app.require_subcommand(1);

  EstimateArgs est;
  CLI::App* estimate = app.add_subcommand("estimate", "Point estimate of the ATT with bootstrap CI");
  estimate->add_option("--data", est.data_path, "CSV data file (s,d,t,y[,id])")->required();
  estimate->add_option("--estimator", est.estimator, "Estimator")
      ->check(CLI::IsMember({"did", "ddd", "cic-emp", "cic-mle", "ccc-emp", "ccc-mle"}))
      ->capture_default_str();
  estimate->add_option("--family", est.family, "Distribution family for MLE estimators")
      ->check(CLI::IsMember({"gaussian", "exponential", "loglinear"}))
      ->capture_default_str();
  estimate->add_option("--state", est.state, "State used by did/cic estimators")
      ->check(CLI::IsMember({"s0", "s1"}))
      ->capture_default_str();
  estimate->add_option("--bootstrap", est.bootstrap_b, "Bootstrap replicates (0 disables the CI)")
      ->capture_default_str();
  estimate->add_option("--level", est.level, "Confidence level")->capture_default_str();
  estimate->add_option("--seed", est.seed, "Bootstrap seed")->capture_default_str();
  estimate->add_flag("--joint", est.joint, "Report the joint counterfactual CDF instead "
                                           "(needs id-linked rows and --grid)");
  estimate->add_option("--grid", est.grid, "Evaluation grid lo:hi:steps (used with --joint)");
  add_output_flags(estimate, est.output);

  BoundsArgs bnd;
  CLI::App* bounds = app.add_subcommand("bounds", "Partial-identification bounds on the "
                                                  "counterfactual CDF");
  bounds->add_option("--data", bnd.data_path, "CSV data file")->required();
  bounds->add_option("--eps", bnd.eps, "Monotonicity slack")->capture_default_str();
  bounds->add_option("--delta", bnd.delta, "Time-invariance slack")->capture_default_str();
  bounds->add_option("--grid", bnd.grid, "Evaluation grid lo:hi:steps")->required();
  add_output_flags(bounds, bnd.output);

  EstimateArgs jnt;
  jnt.joint = true;
  CLI::App* joint = app.add_subcommand("joint", "Joint counterfactual CDF under strong time "
                                                "invariance (panel data)");
  joint->add_option("--data", jnt.data_path, "CSV data file with id column")->required();
  joint->add_option("--grid", jnt.grid, "Evaluation grid lo:hi:steps")->required();
  add_output_flags(joint, jnt.output);

  std::string var_data;
  OutputOptions var_out;
  CLI::App* variance = app.add_subcommand("variance", "Plug-in asymptotic variance report");
  variance->add_option("--data", var_data, "CSV data file")->required();
  add_output_flags(variance, var_out);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Relative-bias Monte Carlo on a synthetic "
                                                      "mechanism");
  simulate->add_option("--dgm", sim.dgm, "Mechanism: linear, nonlinear, exponential-misspec")
      ->capture_default_str();
  simulate->add_option("--estimators", sim.estimators, "Comma-separated estimator list")
      ->capture_default_str();
  simulate->add_option("--n-grid", sim.n_grid, "Comma-separated per-cell sample sizes")
      ->capture_default_str();
  simulate->add_option("--reps", sim.reps, "Replications per grid point")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  add_output_flags(simulate, sim.output);

  OtArgs ot;
  CLI::App* otcmd = app.add_subcommand("ot", "Optimal-transport counterfactual pushforward for "
                                             "point clouds");
  otcmd->add_option("--cloud-dir", ot.cloud_dir,
                    "Directory with s0d0t0.txt ... s1d1t0.txt cloud files")
      ->required();
  otcmd->add_option("--method", ot.method, "Transport solver")
      ->check(CLI::IsMember({"exact", "sinkhorn"}))
      ->capture_default_str();
  otcmd->add_option("--reg", ot.reg, "Sinkhorn regularization (0 = 0.05 x median cost)")
      ->capture_default_str();
  add_output_flags(otcmd, ot.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*estimate) return run_estimate(est);
    if (*bounds) return run_bounds(bnd);
    if (*joint) {
      DataFile data = read_data_file(jnt.data_path);
      return run_joint(data, jnt);
    }
    if (*variance) return run_variance(var_data, var_out);
    if (*simulate) return run_simulate(sim);
    if (*otcmd) return run_ot(ot);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
