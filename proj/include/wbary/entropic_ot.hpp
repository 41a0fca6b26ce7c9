#pragma once

#include "wbary/core.hpp"
#include "wbary/distributions.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <utility>

namespace wbary {

/// log(sum_i exp(x_i)), with -inf entries contributing nothing.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Scalar top = x.maxCoeff();
  if (top == -std::numeric_limits<Scalar>::infinity()) return top;
  return top + std::log((x.array() - top).exp().sum());
}

/// Entrywise log, with log(0) = -inf.
template <typename Derived>
Vector<typename Derived::Scalar> safe_log(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  Vector<Scalar> out(v.size());
  for (Index i = 0; i < v.size(); ++i)
    out[i] = v[i] > Scalar(0) ? std::log(v[i]) : -std::numeric_limits<Scalar>::infinity();
  return out;
}

/// Gibbs kernel K = exp(-M / gamma), held in log domain.
///
/// The dense form stores -M/gamma as an n x n matrix. The separable form is
/// for integer lattices with squared Euclidean cost, where the kernel factors
/// as K_rows (x) K_cols and products with K cost O(n (rows + cols)).
template <typename Scalar = double>
class CostKernel {
 public:
  CostKernel() = default;

  Index size() const { return n_; }
  Scalar gamma() const { return gamma_; }
  bool separable() const { return separable_; }

  /// Null for separable kernels.
  const std::shared_ptr<const CostMatrix<Scalar>>& cost_matrix() const { return cost_; }

  /// Dense -M/gamma; empty for separable kernels (see dense_log_kernel()).
  const Matrix<Scalar>& log_kernel() const { return log_kernel_; }

  Scalar cost(Index i, Index j) const {
    if (!separable_) return (*cost_)(i, j);
    const Scalar dr = spacing_ * Scalar(i / cols_ - j / cols_);
    const Scalar dc = spacing_ * Scalar(i % cols_ - j % cols_);
    return dr * dr + dc * dc;
  }

  Scalar log_kernel_entry(Index i, Index j) const {
    if (!separable_) return log_kernel_(i, j);
    return log_rows_(i / cols_, j / cols_) + log_cols_(i % cols_, j % cols_);
  }

  Matrix<Scalar> dense_log_kernel() const {
    if (!separable_) return log_kernel_;
    Matrix<Scalar> out(n_, n_);
    for (Index j = 0; j < n_; ++j)
      for (Index i = 0; i < n_; ++i) out(i, j) = log_kernel_entry(i, j);
    return out;
  }

  /// out_i = log sum_j K_ij exp(v_j). K is symmetric, so this is also K^T.
  ///
  /// Evaluated as log(K exp(v - max v)) + max v with factors below tiny()
  /// dropped, so every product stays clear of subnormal arithmetic. Outputs
  /// below tiny()^0.8 may have lost their dominant terms and are recomputed by
  /// an exact log-sum-exp.
  template <typename Derived>
  Vector<Scalar> log_apply(const Eigen::MatrixBase<Derived>& v) const {
    require_dims(v.size() == n_, "kernel product: vector length differs from kernel size");
    const Vector<Scalar> flat = v;
    const Scalar shift = flat.maxCoeff();
    if (shift == -std::numeric_limits<Scalar>::infinity())
      return Vector<Scalar>::Constant(n_, -std::numeric_limits<Scalar>::infinity());
    const Scalar cut = std::log(tiny());
    const Vector<Scalar> e = (flat.array() - shift < cut).select(Scalar(0), (flat.array() - shift).exp());
    Vector<Scalar> out(n_);
    using RowMajor = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    if (!separable_) {
      out.noalias() = kernel_ * e;
    } else {
      Eigen::Map<const RowMajor> grid(e.data(), rows_, cols_);
      Eigen::Map<RowMajor>(out.data(), rows_, cols_).noalias() = rows_kernel_ * grid * cols_kernel_;
    }
    const Scalar floor = std::pow(tiny(), Scalar(0.8));
    for (Index i = 0; i < n_; ++i) {
      if (out[i] >= floor) {
        out[i] = std::log(out[i]) + shift;
      } else {
        out[i] = exact_log_apply_entry(flat, i);
      }
    }
    return out;
  }

  /// Reference evaluation of one output by a full log-sum-exp.
  template <typename Derived>
  Scalar exact_log_apply_entry(const Eigen::MatrixBase<Derived>& v, Index i) const {
    if (!separable_) return log_sum_exp(log_kernel_.col(i) + v);
    Vector<Scalar> terms(n_);
    for (Index j = 0; j < n_; ++j) terms[j] = log_kernel_entry(i, j) + v[j];
    return log_sum_exp(terms);
  }

  /// Smallest factor kept by the fast product; products of three such
  /// factors are still normal numbers.
  static Scalar tiny() { return std::cbrt(std::numeric_limits<Scalar>::min()) * Scalar(4); }

  template <typename S>
  friend CostKernel<S> build_kernel(const CostMatrix<S>& cost, S gamma);
  template <typename S>
  friend CostKernel<S> build_separable_kernel(const SupportGrid<S>& grid, S gamma);

 private:
  Index n_ = 0;
  Scalar gamma_ = Scalar(1);
  bool separable_ = false;
  std::shared_ptr<const CostMatrix<Scalar>> cost_;
  Matrix<Scalar> log_kernel_, kernel_;
  Index rows_ = 0, cols_ = 0;
  Scalar spacing_ = Scalar(1);
  Matrix<Scalar> log_rows_, log_cols_, rows_kernel_, cols_kernel_;
};

template <typename Scalar>
void require_positive_gamma(Scalar gamma) {
  if (!(gamma > Scalar(0)))
    throw Error(ErrorCode::NonPositiveGamma, "gamma must be positive, got " + std::to_string(double(gamma)));
}

template <typename Scalar>
CostKernel<Scalar> build_kernel(const CostMatrix<Scalar>& cost, Scalar gamma) {
  require_positive_gamma(gamma);
  CostKernel<Scalar> k;
  k.n_ = cost.size();
  k.gamma_ = gamma;
  k.cost_ = std::make_shared<const CostMatrix<Scalar>>(cost);
  k.log_kernel_ = -cost.entries() / gamma;
  k.kernel_ = k.log_kernel_.array().exp();
  k.kernel_ = (k.kernel_.array() < CostKernel<Scalar>::tiny()).select(Scalar(0), k.kernel_);
  return k;
}

/// Factored kernel for a lattice grid built by SupportGrid::lattice.
template <typename Scalar>
CostKernel<Scalar> build_separable_kernel(const SupportGrid<Scalar>& grid, Scalar gamma) {
  require_positive_gamma(gamma);
  const auto& shape = grid.lattice_shape();
  if (!shape) throw Error(ErrorCode::NonRectangularGrid, "separable kernel needs a lattice grid");
  CostKernel<Scalar> k;
  k.n_ = grid.size();
  k.gamma_ = gamma;
  k.separable_ = true;
  k.rows_ = shape->rows;
  k.cols_ = shape->cols;
  k.spacing_ = shape->spacing;
  auto axis = [gamma, h = shape->spacing](Index len) {
    Matrix<Scalar> a(len, len);
    for (Index j = 0; j < len; ++j)
      for (Index i = 0; i < len; ++i) {
        const Scalar d = h * Scalar(i - j);
        a(i, j) = -d * d / gamma;
      }
    return a;
  };
  k.log_rows_ = axis(k.rows_);
  k.log_cols_ = axis(k.cols_);
  k.rows_kernel_ = k.log_rows_.array().exp();
  k.cols_kernel_ = k.log_cols_.array().exp();
  const Scalar t = CostKernel<Scalar>::tiny();
  k.rows_kernel_ = (k.rows_kernel_.array() < t).select(Scalar(0), k.rows_kernel_);
  k.cols_kernel_ = (k.cols_kernel_.array() < t).select(Scalar(0), k.cols_kernel_);
  return k;
}

template <typename Scalar>
Scalar lipschitz_smoothness(Scalar gamma) {
  require_positive_gamma(gamma);
  return Scalar(1) / gamma;
}

/// Fenchel-Legendre conjugate of p -> W_gamma(p, q):
///   gamma * (E(q) + <q, log K alpha>),  alpha = exp(y / gamma).
template <typename Derived, typename Scalar>
Scalar dual_value(const Eigen::MatrixBase<Derived>& y, const DiscreteDistribution<Scalar>& q,
                  const CostKernel<Scalar>& kernel) {
  require_dims(y.size() == q.size() && q.size() == kernel.size(), "dual value: size mismatch");
  const Vector<Scalar> log_k_alpha = kernel.log_apply(y / kernel.gamma());
  Scalar acc = Scalar(0);
  for (Index j = 0; j < q.size(); ++j) {
    const Scalar qj = q[j];
    if (qj > Scalar(0)) acc += qj * (log_k_alpha[j] - std::log(qj));
  }
  return kernel.gamma() * acc;
}

/// Gradient of the conjugate, alpha o (K (q / K alpha)), computed in log
/// domain and renormalized onto the simplex.
template <typename Derived, typename Scalar>
DiscreteDistribution<Scalar> dual_gradient(const Eigen::MatrixBase<Derived>& y,
                                           const DiscreteDistribution<Scalar>& q,
                                           const CostKernel<Scalar>& kernel) {
  require_dims(y.size() == q.size() && q.size() == kernel.size(), "dual gradient: size mismatch");
  const Vector<Scalar> a = y / kernel.gamma();
  const Vector<Scalar> b = safe_log(q.weights()) - kernel.log_apply(a);
  Vector<Scalar> lg = a + kernel.log_apply(b);
  lg.array() -= lg.maxCoeff();
  Vector<Scalar> g = lg.array().exp();
  g /= g.sum();
  return DiscreteDistribution<Scalar>(std::move(g));
}

template <typename Scalar = double>
struct TransportPlan {
  Matrix<Scalar> plan;
  DiscreteDistribution<Scalar> marginal_row;
  DiscreteDistribution<Scalar> marginal_col;
};

template <typename Scalar = double>
struct SinkhornResult {
  TransportPlan<Scalar> transport;
  /// <M, X> - gamma E(X) at the returned plan.
  Scalar value;
  Index sweeps;
  /// Log scalings: X_ij = exp(f_i + log K_ij + g_j).
  Vector<Scalar> f, g;
};

/// Entropic transport between p and q by alternating log-domain scalings.
template <typename Scalar>
SinkhornResult<Scalar> sinkhorn_transport(const DiscreteDistribution<Scalar>& p,
                                          const DiscreteDistribution<Scalar>& q,
                                          const CostKernel<Scalar>& kernel,
                                          Scalar tol = Scalar(1e-10), Index max_iter = 100000) {
  require_dims(p.size() == q.size() && p.size() == kernel.size(), "sinkhorn: size mismatch");
  if (!(tol > Scalar(0))) throw Error(ErrorCode::InvalidParameter, "tolerance must be positive");
  const Index n = p.size();
  const Vector<Scalar> log_p = safe_log(p.weights());
  const Vector<Scalar> log_q = safe_log(q.weights());
  Vector<Scalar> f = Vector<Scalar>::Zero(n);
  Vector<Scalar> g(n);

  auto build_plan = [&]() {
    Matrix<Scalar> x(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) x(i, j) = std::exp(f[i] + kernel.log_kernel_entry(i, j) + g[j]);
    return x;
  };

  for (Index sweep = 1; sweep <= max_iter; ++sweep) {
    g = log_q - kernel.log_apply(f);
    f = log_p - kernel.log_apply(g);
    // Rows are exact after the f-update; columns measure progress.
    const Vector<Scalar> col = (g + kernel.log_apply(f)).array().exp();
    if ((col - q.weights()).template lpNorm<1>() > tol / 2 && sweep < max_iter) continue;

    Matrix<Scalar> x = build_plan();
    const Scalar row_err = (x.rowwise().sum() - p.weights()).template lpNorm<1>();
    const Scalar col_err = (x.colwise().sum().transpose() - q.weights()).template lpNorm<1>();
    if (std::max(row_err, col_err) > tol) {
      if (sweep < max_iter) continue;
      throw Error(ErrorCode::NoConvergence,
                  "sinkhorn marginal violation " + std::to_string(double(std::max(row_err, col_err))));
    }
    Scalar value = Scalar(0);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        const Scalar xij = x(i, j);
        if (xij > Scalar(0)) value += xij * (kernel.cost(i, j) + kernel.gamma() * std::log(xij));
      }
    return {TransportPlan<Scalar>{std::move(x), p, q}, value, sweep, std::move(f), std::move(g)};
  }
  throw Error(ErrorCode::NoConvergence, "sinkhorn did not converge");
}

/// W_gamma(p, q) via sinkhorn_transport.
template <typename Scalar>
Scalar entropic_cost(const DiscreteDistribution<Scalar>& p, const DiscreteDistribution<Scalar>& q,
                     const CostKernel<Scalar>& kernel, Scalar tol = Scalar(1e-10)) {
  return sinkhorn_transport(p, q, kernel, tol).value;
}

}  // namespace wbary
