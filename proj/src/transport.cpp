#include "triplex/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "triplex/rng.hpp"

namespace triplex {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

double TransportPlan::transport_cost(const PointCloud& source, const PointCloud& target) const {
  double total = 0.0;
  for (std::size_t i = 0; i < n_source; ++i)
    for (std::size_t j = 0; j < n_target; ++j)
      total += mass(i, j) * squared_distance(source.point(i), target.point(j));
  return total;
}

std::span<const double> BrenierMapApprox::apply(std::span<const double> x) const {
  if (x.size() != source.dim())
    throw Error(Errc::DimensionMismatch, "query point has wrong dimension");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < source.size(); ++i) {
    const double d = squared_distance(x, source.point(i));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return images.point(best);
}

PointCloud BrenierMapApprox::push(const PointCloud& cloud) const {
  PointCloud out(images.dim());
  for (std::size_t i = 0; i < cloud.size(); ++i) out.add(apply(cloud.point(i)));
  return out;
}

double brenier_1d(const CellSamples& source, const CellSamples& target, double y) {
  EmpiricalCdf f_source(source), f_target(target);
  return f_target.quantile(f_source.cdf(y));
}

namespace {

std::vector<double> cost_matrix(const PointCloud& source, const PointCloud& target) {
  if (source.dim() != target.dim())
    throw Error(Errc::DimensionMismatch, "clouds have different dimensions");
  if (source.empty() || target.empty())
    throw Error(Errc::EmptyCell, "empty point cloud");
  std::vector<double> cost(source.size() * target.size());
  for (std::size_t i = 0; i < source.size(); ++i)
    for (std::size_t j = 0; j < target.size(); ++j)
      cost[i * target.size() + j] = squared_distance(source.point(i), target.point(j));
  return cost;
}

double log_sum_exp(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

double default_sinkhorn_reg(const PointCloud& source, const PointCloud& target) {
  std::vector<double> cost = cost_matrix(source, target);
  std::nth_element(cost.begin(), cost.begin() + cost.size() / 2, cost.end());
  const double median = cost[cost.size() / 2];
  return median > 0.0 ? 0.05 * median : 1e-3;
}

TransportPlan sinkhorn_plan(const PointCloud& source, const PointCloud& target, double reg,
                            std::size_t max_iter, double tol) {
  if (!(reg > 0.0)) throw Error(Errc::DomainError, "sinkhorn regularization must be positive");
  const std::vector<double> cost = cost_matrix(source, target);
  const std::size_t n = source.size(), m = target.size();
  const double log_a = -std::log(static_cast<double>(n));
  const double log_b = -std::log(static_cast<double>(m));

  std::vector<double> f(n, 0.0), g(m, 0.0), buf(std::max(n, m));

  TransportPlan plan;
  plan.n_source = n;
  plan.n_target = m;

  // Regularized energy (negative dual). Exact alternating updates can only
  // lower it, which the objective_trace records.
  auto energy = [&]() {
    double lin = 0.0;
    for (std::size_t i = 0; i < n; ++i) lin += f[i] / static_cast<double>(n);
    for (std::size_t j = 0; j < m; ++j) lin += g[j] / static_cast<double>(m);
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        mass += std::exp((f[i] + g[j] - cost[i * m + j]) / reg + log_a + log_b);
    return -(lin - reg * mass + reg);
  };

  double err = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  for (; it < max_iter; ++it) {
    // Row scaling: afterwards every row sums to 1/n exactly (in exact math).
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) buf[j] = (g[j] - cost[i * m + j]) / reg + log_b;
      f[i] = -reg * log_sum_exp({buf.data(), m});
    }
    // Column scaling.
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) buf[i] = (f[i] - cost[i * m + j]) / reg + log_a;
      g[j] = -reg * log_sum_exp({buf.data(), n});
    }
    plan.objective_trace.push_back(energy());

    // Row marginal violation; columns are exact right after their scaling.
    err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        row += std::exp((f[i] + g[j] - cost[i * m + j]) / reg + log_a + log_b);
      err = std::max(err, std::fabs(row - 1.0 / static_cast<double>(n)));
    }
    if (err < tol) {
      ++it;
      break;
    }
  }

  plan.iterations = it;
  plan.converged = err < tol;
  plan.marginal_error = err;
  plan.coupling.resize(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      plan.coupling[i * m + j] = std::exp((f[i] + g[j] - cost[i * m + j]) / reg + log_a + log_b);
  return plan;
}

BrenierMapApprox barycentric_map(const TransportPlan& plan, const PointCloud& source,
                                 const PointCloud& target) {
  PointCloud images(target.dim());
  std::vector<double> point(target.dim());
  for (std::size_t i = 0; i < plan.n_source; ++i) {
    std::fill(point.begin(), point.end(), 0.0);
    double row_mass = 0.0;
    for (std::size_t j = 0; j < plan.n_target; ++j) {
      const double w = plan.mass(i, j);
      row_mass += w;
      const auto t = target.point(j);
      for (std::size_t k = 0; k < t.size(); ++k) point[k] += w * t[k];
    }
    for (double& x : point) x /= row_mass;
    images.add(point);
  }
  return BrenierMapApprox{source, std::move(images)};
}

std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n) {
  // Shortest augmenting path with dual potentials, 1-based work arrays.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 1; j <= n; ++j) perm[p[j] - 1] = j - 1;
  return perm;
}

BrenierMapApprox exact_assignment_map(const PointCloud& source, const PointCloud& target) {
  if (source.dim() != target.dim())
    throw Error(Errc::DimensionMismatch, "clouds have different dimensions");
  if (source.size() != target.size())
    throw Error(Errc::SizeMismatch, "exact assignment needs equal-size clouds");
  const std::size_t n = source.size();
  const std::vector<double> cost = cost_matrix(source, target);
  const std::vector<std::size_t> perm = solve_assignment(cost, n);
  PointCloud images(target.dim());
  for (std::size_t i = 0; i < n; ++i) images.add(target.point(perm[i]));
  return BrenierMapApprox{source, std::move(images)};
}

namespace {

BrenierMapApprox build_map(const PointCloud& source, const PointCloud& target,
                           const OtMethod& method, const std::string& name) {
  try {
    if (method.kind == OtMethod::Kind::Exact) return exact_assignment_map(source, target);
    const double reg = method.reg > 0.0 ? method.reg : default_sinkhorn_reg(source, target);
    TransportPlan plan = sinkhorn_plan(source, target, reg);
    return barycentric_map(plan, source, target);
  } catch (const Error& e) {
    throw Error(e.code(), std::string(e.what()) + " (map " + name + ")");
  }
}

}  // namespace

PointCloud triple_changes_pushforward(const CloudTable& clouds, const OtMethod& method) {
  const PointCloud& eta_s1d1 = clouds.cloud(cell_id(1, 1, 0));

  BrenierMapApprox t_s1d0 =
      build_map(clouds.cloud(cell_id(1, 0, 0)), clouds.cloud(cell_id(1, 0, 1)), method, "T_s1d0");
  BrenierMapApprox t_s0d0 =
      build_map(clouds.cloud(cell_id(0, 0, 0)), clouds.cloud(cell_id(0, 0, 1)), method, "T_s0d0");

  // Image of the (s0,d1) pre-period cloud under its state's control-group map;
  // the drift map is fitted from this image onto the (s0,d1) post-period cloud.
  PointCloud transported = t_s0d0.push(clouds.cloud(cell_id(0, 1, 0)));
  BrenierMapApprox t_star =
      build_map(transported, clouds.cloud(cell_id(0, 1, 1)), method, "T_star");

  PointCloud out(eta_s1d1.dim());
  for (std::size_t i = 0; i < eta_s1d1.size(); ++i)
    out.add(t_star.apply(t_s1d0.apply(eta_s1d1.point(i))));
  return out;
}

double monotonicity_violation_rate(const BrenierMapApprox& map, std::size_t n_pairs,
                                   std::uint64_t seed) {
  if (map.source.size() < 2) return 0.0;
  RngStream rng(seed, {0x6d6f6e6fULL});
  std::size_t violations = 0;
  for (std::size_t k = 0; k < n_pairs; ++k) {
    const std::size_t i = rng.index(map.source.size());
    std::size_t j = rng.index(map.source.size());
    if (j == i) j = (j + 1) % map.source.size();
    const auto xi = map.source.point(i), xj = map.source.point(j);
    const auto ti = map.images.point(i), tj = map.images.point(j);
    double dot = 0.0;
    for (std::size_t c = 0; c < xi.size(); ++c) dot += (xi[c] - xj[c]) * (ti[c] - tj[c]);
    if (dot < 0.0) ++violations;
  }
  return static_cast<double>(violations) / static_cast<double>(n_pairs);
}

}  // namespace triplex
