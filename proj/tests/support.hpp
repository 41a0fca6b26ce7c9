#pragma once

#include "wbary/core.hpp"
#include "wbary/distributions.hpp"
#include "wbary/entropic_ot.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#define CHECK_ERROR_CODE(expr, expected)                                  \
  do {                                                                    \
    bool thrown_ = false;                                                 \
    try {                                                                 \
      (void)(expr);                                                       \
    } catch (const wbary::Error& e_) {                                    \
      thrown_ = true;                                                     \
      CHECK_MESSAGE(e_.code() == (expected), e_.what());                  \
    }                                                                     \
    CHECK_MESSAGE(thrown_, "expected " << wbary::to_string(expected));   \
  } while (0)

namespace testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(rng, lo, hi);
  return v;
}

/// Uniform on the simplex (normalized exponentials).
inline wbary::DiscreteDistribution<double> random_simplex(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = -std::log(uniform(rng, 1e-12, 1.0));
  return wbary::DiscreteDistribution<double>(v / v.sum());
}

/// Sorted random points in [0, 1] (distinct with probability one).
inline wbary::SupportGrid<double> random_grid(Rng& rng, Eigen::Index n) {
  Eigen::MatrixXd pts(1, n);
  for (Eigen::Index i = 0; i < n; ++i) pts(0, i) = uniform(rng, 0.0, 1.0);
  return wbary::SupportGrid<double>(pts);
}

inline wbary::CostKernel<double> random_kernel(Rng& rng, Eigen::Index n, double gamma) {
  return wbary::build_kernel(wbary::euclidean_cost_matrix(random_grid(rng, n)), gamma);
}

/// Golden-section minimum of a convex function on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && b - a > 1e-16; ++i) {
    if (fc < fd) {
      b = d; d = c; fd = fc; c = b - phi * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd; d = a + phi * (b - a); fd = f(d);
    }
  }
  return std::min({f(lo), f(hi), f(0.5 * (a + b))});
}

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// W_gamma(p, q) for n = 2 by direct minimization over the one free entry of
/// the 2 x 2 coupling: a coarse grid followed by golden-section refinement.
inline double entropic_cost_2x2(double p1, double q1, const Eigen::Matrix2d& M, double gamma) {
  const double p2 = 1.0 - p1, q2 = 1.0 - q1;
  const double lo = std::max(0.0, p1 + q1 - 1.0), hi = std::min(p1, q1);
  auto objective = [&](double x) {
    const double x11 = x, x12 = p1 - x, x21 = q1 - x, x22 = p2 - q1 + x;
    (void)q2;
    return M(0, 0) * x11 + M(0, 1) * x12 + M(1, 0) * x21 + M(1, 1) * x22 +
           gamma * (xlogx(x11) + xlogx(std::max(0.0, x12)) + xlogx(std::max(0.0, x21)) + xlogx(std::max(0.0, x22)));
  };
  if (hi - lo <= 0.0) return objective(lo);
  const int grid = 200;
  int best = 0;
  double best_val = objective(lo);
  for (int k = 1; k <= grid; ++k) {
    const double v = objective(lo + (hi - lo) * k / grid);
    if (v < best_val) { best_val = v; best = k; }
  }
  const double a = lo + (hi - lo) * std::max(0, best - 1) / grid;
  const double b = lo + (hi - lo) * std::min(grid, best + 1) / grid;
  return std::min(best_val, golden_min(objective, a, b));
}

/// max over a uniform grid of S_1(2) of <y, p> - W_gamma(p, q).
inline double dual_value_2x2_oracle(const Eigen::Vector2d& y, double q1, const Eigen::Matrix2d& M, double gamma,
                                    int points = 10000) {
  double best = -INFINITY;
  for (int k = 0; k <= points; ++k) {
    const double p1 = double(k) / points;
    best = std::max(best, y[0] * p1 + y[1] * (1.0 - p1) - entropic_cost_2x2(p1, q1, M, gamma));
  }
  return best;
}

/// Central finite-difference gradient.
inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

}  // namespace testing
