#ifndef TRIPLEX_TRANSPORT_HPP_
#define TRIPLEX_TRANSPORT_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "triplex/cells.hpp"
#include "triplex/empirical.hpp"

namespace triplex {

// Uniformly weighted sample of d-dimensional points.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::size_t dim) : dim_(dim) {}
  PointCloud(std::size_t dim, std::vector<double> data) : dim_(dim), data_(std::move(data)) {
    if (dim_ == 0 || data_.size() % dim_ != 0)
      throw Error(Errc::DimensionMismatch, "point data not a multiple of the dimension");
    for (double v : data_)
      if (!std::isfinite(v)) throw Error(Errc::BadInput, "non-finite point coordinate");
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const { return data_.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  void add(std::span<const double> p) {
    if (p.size() != dim_) throw Error(Errc::DimensionMismatch, "point has wrong dimension");
    data_.insert(data_.end(), p.begin(), p.end());
  }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

// Entropic-regularized coupling between two uniform clouds.
struct TransportPlan {
  std::size_t n_source = 0;
  std::size_t n_target = 0;
  std::vector<double> coupling;        // row-major n_source x n_target
  bool converged = false;
  std::size_t iterations = 0;
  double marginal_error = 0.0;         // worst row/column marginal violation
  std::vector<double> objective_trace;  // regularized energy per iteration, nonincreasing

  double mass(std::size_t i, std::size_t j) const { return coupling[i * n_target + j]; }

  // <C, plan>: transport cost of the plan under squared-Euclidean cost.
  double transport_cost(const PointCloud& source, const PointCloud& target) const;
};

// Discrete approximation of the quadratic-cost optimal map: each source point
// carries an image point. Queries off the source support are answered by the
// nearest source point's image.
struct BrenierMapApprox {
  PointCloud source;
  PointCloud images;

  std::span<const double> apply(std::span<const double> x) const;
  PointCloud push(const PointCloud& cloud) const;
};

// One-dimensional optimal map between two sample sets: quantile composition
// F^{-1}_target o F_source.
double brenier_1d(const CellSamples& source, const CellSamples& target, double y);

// Log-domain Sinkhorn iteration for squared-Euclidean cost. reg > 0; stops
// when both marginals are within tol or max_iter is reached (converged flag
// records which).
TransportPlan sinkhorn_plan(const PointCloud& source, const PointCloud& target, double reg,
                            std::size_t max_iter = 2000, double tol = 1e-9);

// Default regularization: 0.05 x median pairwise cost.
double default_sinkhorn_reg(const PointCloud& source, const PointCloud& target);

// Barycentric projection of a plan: source point i maps to the
// coupling-weighted average of the target points in its row.
BrenierMapApprox barycentric_map(const TransportPlan& plan, const PointCloud& source,
                                 const PointCloud& target);

// Exact quadratic-cost matching between equal-size clouds (shortest
// augmenting path assignment). Ties resolve to the lowest index.
BrenierMapApprox exact_assignment_map(const PointCloud& source, const PointCloud& target);

std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n);

// Seven point clouds keyed like the CellTable; (s1,d1,t1) stays empty (it is
// what the pushforward produces).
class CloudTable {
 public:
  void set(CellId id, PointCloud cloud) {
    if (cloud.empty()) throw Error(Errc::EmptyCell, "empty cloud " + cell_name(id));
    clouds_[id.index()] = std::move(cloud);
  }
  bool has(CellId id) const { return clouds_[id.index()].has_value(); }
  const PointCloud& cloud(CellId id) const {
    const auto& slot = clouds_[id.index()];
    if (!slot) throw Error(Errc::MissingCell, "missing cloud " + cell_name(id));
    return *slot;
  }

 private:
  std::array<std::optional<PointCloud>, 8> clouds_;
};

struct OtMethod {
  enum class Kind { Exact, Sinkhorn } kind = Kind::Exact;
  double reg = 0.0;  // 0 selects the default regularization

  static OtMethod exact() { return {Kind::Exact, 0.0}; }
  static OtMethod sinkhorn(double reg = 0.0) { return {Kind::Sinkhorn, reg}; }
};

// The counterfactual pushforward: builds the time maps of the two control
// groups, transports the (s0,d1) pre-period cloud through its state's control
// map, fits the drift map from that image onto the (s0,d1) post-period cloud,
// and returns the (s1,d1) pre-period cloud pushed through drift o control.
PointCloud triple_changes_pushforward(const CloudTable& clouds, const OtMethod& method);

// Fraction of sampled point pairs on which the fitted map violates pairwise
// monotonicity <x_i - x_j, T(x_i) - T(x_j)> >= 0. Identification needs
// (co-)cyclic monotonicity, which data cannot certify; this flags gross
// violations of its pairwise consequence on convex supports.
double monotonicity_violation_rate(const BrenierMapApprox& map, std::size_t n_pairs,
                                   std::uint64_t seed);

}  // namespace triplex

#endif  // TRIPLEX_TRANSPORT_HPP_
