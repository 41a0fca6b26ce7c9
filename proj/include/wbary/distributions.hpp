#pragma once

#include "wbary/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

namespace wbary {

/// Finite support {x_1, ..., x_n} in R^d, stored column-wise (d x n).
///
/// Grids built from images additionally remember their lattice shape so the
/// barycenter can be written back as a picture.
template <typename Scalar = double>
class SupportGrid {
 public:
  struct LatticeShape {
    Index rows;
    Index cols;
    Scalar spacing = Scalar(1);
  };

  SupportGrid() = default;

  explicit SupportGrid(Matrix<Scalar> points,
                       std::optional<LatticeShape> shape = std::nullopt)
      : points_(std::move(points)), shape_(shape) {
    if (points_.cols() < 1 || points_.rows() < 1)
      throw Error(ErrorCode::InvalidParameter, "support grid needs n >= 1 points of dimension >= 1");
    if (shape_ && shape_->rows * shape_->cols != points_.cols())
      throw Error(ErrorCode::InvalidParameter, "lattice shape does not match point count");
    check_distinct();
  }

  /// n equally spaced points on [lo, hi].
  static SupportGrid equispaced(Scalar lo, Scalar hi, Index n) {
    if (n < 1 || !(hi > lo || n == 1))
      throw Error(ErrorCode::InvalidParameter, "equispaced grid needs n >= 1 and hi > lo");
    Matrix<Scalar> pts(1, n);
    for (Index i = 0; i < n; ++i)
      pts(0, i) = n == 1 ? lo : lo + (hi - lo) * Scalar(i) / Scalar(n - 1);
    return SupportGrid(std::move(pts));
  }

  /// Pixel coordinates spacing * (row, col) of a rows x cols image, row-major.
  static SupportGrid lattice(Index rows, Index cols, Scalar spacing = Scalar(1)) {
    if (rows < 1 || cols < 1) throw Error(ErrorCode::InvalidParameter, "empty lattice");
    if (!(spacing > Scalar(0))) throw Error(ErrorCode::InvalidParameter, "lattice spacing must be positive");
    Matrix<Scalar> pts(2, rows * cols);
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) {
        pts(0, r * cols + c) = spacing * Scalar(r);
        pts(1, r * cols + c) = spacing * Scalar(c);
      }
    return SupportGrid(std::move(pts), LatticeShape{rows, cols, spacing});
  }

  Index size() const { return points_.cols(); }
  Index dimension() const { return points_.rows(); }
  const Matrix<Scalar>& points() const { return points_; }
  auto point(Index i) const { return points_.col(i); }
  const std::optional<LatticeShape>& lattice_shape() const { return shape_; }

 private:
  void check_distinct() const {
    std::vector<Index> order(static_cast<std::size_t>(size()));
    std::iota(order.begin(), order.end(), Index{0});
    auto less = [this](Index a, Index b) {
      for (Index k = 0; k < dimension(); ++k) {
        if (points_(k, a) < points_(k, b)) return true;
        if (points_(k, b) < points_(k, a)) return false;
      }
      return false;
    };
    std::sort(order.begin(), order.end(), less);
    for (std::size_t i = 1; i < order.size(); ++i)
      if (points_.col(order[i - 1]) == points_.col(order[i]))
        throw Error(ErrorCode::InvalidParameter, "support points must be distinct");
  }

  Matrix<Scalar> points_;
  std::optional<LatticeShape> shape_;
};

/// A point of the probability simplex S_1(n). Exact zeros are allowed.
template <typename Scalar = double>
class DiscreteDistribution {
 public:
  static constexpr Scalar kDefaultTol =
      std::max(Scalar(1e-12), Scalar(64) * std::numeric_limits<Scalar>::epsilon());

  DiscreteDistribution() = default;

  /// Validates v against the simplex (see validate_simplex).
  explicit DiscreteDistribution(Vector<Scalar> weights, Scalar tol = kDefaultTol)
      : weights_(std::move(weights)) {
    if (weights_.size() == 0) throw Error(ErrorCode::InvalidParameter, "empty weight vector");
    for (Index i = 0; i < weights_.size(); ++i) {
      if (!(weights_[i] >= -tol))
        throw Error(ErrorCode::NegativeWeight, "weight " + std::to_string(i) + " is negative");
    }
    const Scalar total = weights_.sum();
    if (!(std::abs(total - Scalar(1)) <= tol))
      throw Error(ErrorCode::NotNormalized, "weights sum to " + std::to_string(double(total)));
  }

  Index size() const { return weights_.size(); }
  const Vector<Scalar>& weights() const { return weights_; }
  Scalar operator[](Index i) const { return weights_[i]; }

 private:
  Vector<Scalar> weights_;
};

template <typename Derived>
DiscreteDistribution<typename Derived::Scalar> validate_simplex(
    const Eigen::MatrixBase<Derived>& v,
    typename Derived::Scalar tol = DiscreteDistribution<typename Derived::Scalar>::kDefaultTol) {
  return DiscreteDistribution<typename Derived::Scalar>(v, tol);
}

/// Ground cost matrix: nonnegative and symmetric.
template <typename Scalar = double>
class CostMatrix {
 public:
  CostMatrix() = default;

  explicit CostMatrix(Matrix<Scalar> entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
      throw Error(ErrorCode::DimensionMismatch, "cost matrix must be square and nonempty");
    if ((entries_.array() < Scalar(0)).any())
      throw Error(ErrorCode::InvalidParameter, "cost matrix has negative entries");
    if (!(entries_ - entries_.transpose()).isZero(Scalar(0)))
      throw Error(ErrorCode::InvalidParameter, "cost matrix is not symmetric");
  }

  Index size() const { return entries_.rows(); }
  const Matrix<Scalar>& entries() const { return entries_; }
  Scalar operator()(Index i, Index j) const { return entries_(i, j); }

 private:
  Matrix<Scalar> entries_;
};

/// Pointwise evaluation of the Gaussian density on the grid, renormalized.
template <typename Scalar>
DiscreteDistribution<Scalar> discretize_truncated_gaussian(Scalar mu, Scalar sigma,
                                                           const SupportGrid<Scalar>& grid) {
  if (!(sigma > Scalar(0))) throw Error(ErrorCode::InvalidParameter, "sigma must be positive");
  if (grid.dimension() != 1) throw Error(ErrorCode::DimensionMismatch, "gaussian grid must be 1-D");
  Vector<Scalar> w(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const Scalar d = grid.point(i)(0) - mu;
    w[i] = std::exp(-d * d / (Scalar(2) * sigma * sigma));
  }
  const Scalar total = w.sum();
  if (!(total > Scalar(0)))
    throw Error(ErrorCode::DegenerateDensity, "every density value underflowed to zero");
  return DiscreteDistribution<Scalar>(w / total);
}

/// Pixel intensities normalized to unit mass on the (row, col) lattice.
template <typename Derived>
std::pair<DiscreteDistribution<typename Derived::Scalar>, SupportGrid<typename Derived::Scalar>>
image_to_distribution(const Eigen::MatrixBase<Derived>& pixels,
                      typename Derived::Scalar spacing = typename Derived::Scalar(1)) {
  using Scalar = typename Derived::Scalar;
  if ((pixels.array() < Scalar(0)).any())
    throw Error(ErrorCode::NegativeWeight, "image has negative pixels");
  const Scalar total = pixels.sum();
  if (!(total > Scalar(0))) throw Error(ErrorCode::AllZeroImage, "image has no mass");
  const Index rows = pixels.rows(), cols = pixels.cols();
  Vector<Scalar> w(rows * cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) w[r * cols + c] = pixels(r, c) / total;
  return {DiscreteDistribution<Scalar>(std::move(w)), SupportGrid<Scalar>::lattice(rows, cols, spacing)};
}

/// M_ij = ||x_i - x_j||_2^2.
template <typename Scalar>
CostMatrix<Scalar> euclidean_cost_matrix(const SupportGrid<Scalar>& grid) {
  const Index n = grid.size();
  Matrix<Scalar> m(n, n);
  for (Index j = 0; j < n; ++j) {
    m(j, j) = Scalar(0);
    for (Index i = j + 1; i < n; ++i) {
      const Scalar d2 = (grid.point(i) - grid.point(j)).squaredNorm();
      m(i, j) = d2;
      m(j, i) = d2;
    }
  }
  return CostMatrix<Scalar>(std::move(m));
}

}  // namespace wbary
