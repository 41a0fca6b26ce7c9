#pragma once

#include "wbary/entropic_ot.hpp"

#include <functional>
#include <vector>

namespace wbary {

template <typename Scalar = double>
struct OracleResult {
  DiscreteDistribution<Scalar> barycenter;
  Scalar residual;
  Index iterations;
};

/// Uniform-weight entropic barycenter by iterative Bregman projections in log
/// domain. `observer` sees the normalized barycenter estimate after each sweep.
template <typename Scalar>
OracleResult<Scalar> ibp_barycenter(
    const std::vector<DiscreteDistribution<Scalar>>& q_list, const CostKernel<Scalar>& kernel,
    Scalar tol = Scalar(1e-10), Index max_iter = 1000000,
    const std::function<void(Index, const Vector<Scalar>&)>& observer = {}) {
  if (q_list.empty()) throw Error(ErrorCode::InvalidParameter, "ibp needs at least one distribution");
  if (!(tol > Scalar(0))) throw Error(ErrorCode::InvalidParameter, "tolerance must be positive");
  const Index n = kernel.size();
  const auto m = q_list.size();
  for (const auto& q : q_list) require_dims(q.size() == n, "ibp: support size differs from kernel");

  std::vector<Vector<Scalar>> log_q, f(m, Vector<Scalar>::Zero(n)), g(m), r(m);
  for (const auto& q : q_list) log_q.push_back(safe_log(q.weights()));

  Scalar residual = std::numeric_limits<Scalar>::infinity();
  for (Index iter = 1; iter <= max_iter; ++iter) {
    Vector<Scalar> log_bary = Vector<Scalar>::Zero(n);
    for (std::size_t i = 0; i < m; ++i) {
      g[i] = log_q[i] - kernel.log_apply(f[i]);
      r[i] = f[i] + kernel.log_apply(g[i]);
      log_bary += r[i] / Scalar(m);
    }
    const Vector<Scalar> bary = log_bary.array().exp();
    residual = Scalar(0);
    for (std::size_t i = 0; i < m; ++i)
      residual = std::max(residual, (Vector<Scalar>(r[i].array().exp()) - bary).template lpNorm<1>());

    const Vector<Scalar> normalized = bary / bary.sum();
    if (observer) observer(iter, normalized);
    if (residual <= tol) return {DiscreteDistribution<Scalar>(normalized), residual, iter};
    for (std::size_t i = 0; i < m; ++i) f[i] += log_bary - r[i];
  }
  throw Error(ErrorCode::NoConvergence, "ibp residual " + std::to_string(double(residual)));
}

/// Optimal value of the dual problem, min_y sum_i W*_{gamma,q_i}(y_i) over
/// sum_i y_i = 0, obtained by strong duality as -sum_i W_gamma(p_bar, q_i)
/// at the IBP barycenter p_bar.
template <typename Scalar>
Scalar reference_dual_optimum(const std::vector<DiscreteDistribution<Scalar>>& q_list,
                              const CostKernel<Scalar>& kernel, Scalar tol = Scalar(1e-12)) {
  const auto bary = ibp_barycenter(q_list, kernel, tol).barycenter;
  Scalar acc = Scalar(0);
  for (const auto& q : q_list) acc -= sinkhorn_transport(bary, q, kernel, tol, 10000000).value;
  return acc;
}

/// Calls visit(p) for every point of the simplex lattice {a / resolution}.
template <typename Scalar, typename Visit>
void for_each_simplex_point(Index n, Index resolution, Visit&& visit) {
  Vector<Scalar> p(n);
  std::vector<Index> counts(static_cast<std::size_t>(n), 0);
  // Recursive enumeration of compositions of `resolution` into n parts.
  std::function<void(Index, Index)> rec = [&](Index pos, Index remaining) {
    if (pos == n - 1) {
      counts[static_cast<std::size_t>(pos)] = remaining;
      for (Index i = 0; i < n; ++i) p[i] = Scalar(counts[static_cast<std::size_t>(i)]) / Scalar(resolution);
      visit(p);
      return;
    }
    for (Index c = 0; c <= remaining; ++c) {
      counts[static_cast<std::size_t>(pos)] = c;
      rec(pos + 1, remaining - c);
    }
  };
  rec(0, resolution);
}

/// max over the simplex mesh of <y, p> - W_gamma(p, q), with W_gamma from
/// sinkhorn_transport. A lower bound on dual_value(y, q).
template <typename Derived, typename Scalar>
Scalar grid_search_dual(const DiscreteDistribution<Scalar>& q, const CostKernel<Scalar>& kernel,
                        const Eigen::MatrixBase<Derived>& y, Index resolution) {
  const Index n = q.size();
  if (n > 3) throw Error(ErrorCode::DimensionTooLarge, "grid search is limited to n <= 3");
  if (resolution < 10) throw Error(ErrorCode::InvalidParameter, "resolution must be >= 10");
  require_dims(y.size() == n && kernel.size() == n, "grid search: size mismatch");
  const Vector<Scalar> yv = y;
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  for_each_simplex_point<Scalar>(n, resolution, [&](const Vector<Scalar>& p) {
    const DiscreteDistribution<Scalar> pd(p, Scalar(1e-9));
    const Scalar value = yv.dot(p) - sinkhorn_transport(pd, q, kernel, Scalar(1e-12), 1000000).value;
    best = std::max(best, value);
  });
  return best;
}

}  // namespace wbary
