#pragma once

#include "wordbias/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace wordbias {

namespace detail {

/// Flips vector signs so the entry of largest magnitude is positive. Pure
/// determinism convention; callers must not depend on the sign.
inline void fix_sign(Eigen::Ref<Vector> v) {
  Index arg = 0;
  double best = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > best) {
      best = mag;
      arg = i;
    }
  }
  if (v(arg) < 0.0) v = -v;
}

}  // namespace detail

struct PcaModel {
  Vector mean;                // column mean of the input points
  Matrix components;          // m x d, rows orthonormal, variance descending
  Vector explained_variance;  // m non-negative reals, non-increasing
};

/// Principal components via eigendecomposition of the sample covariance
/// (n-1 denominator). Component signs follow the largest-entry-positive
/// convention.
inline PcaModel principal_components(const Matrix& points, Index m) {
  const Index n = points.rows(), d = points.cols();
  require(n >= 2, errc::invalid, "principal_components: need at least 2 points");
  require(m >= 1 && m <= std::min(n, d), errc::invalid,
          "principal_components: m out of range");

  PcaModel model;
  model.mean = points.colwise().mean().transpose();
  Matrix centered = points.rowwise() - model.mean.transpose();
  Matrix covariance = (centered.transpose() * centered) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Matrix> solver(covariance);
  require(solver.info() == Eigen::Success, errc::numeric,
          "principal_components: eigendecomposition failed");

  model.components.resize(m, d);
  model.explained_variance.resize(m);
  for (Index i = 0; i < m; ++i) {
    const Index source = d - 1 - i;  // solver returns ascending order
    Vector component = solver.eigenvectors().col(source);
    detail::fix_sign(component);
    model.components.row(i) = component.transpose();
    model.explained_variance(i) = std::max(0.0, solver.eigenvalues()(source));
  }
  return model;
}

struct EigenPairs {
  Vector values;   // ascending
  Matrix vectors;  // n x m, column j pairs with values(j), orthonormal
};

/// The m algebraically smallest eigenpairs of a symmetric matrix.
inline EigenPairs symmetric_eigen_smallest(const Matrix& M, Index m) {
  const Index n = M.rows();
  require(M.cols() == n, errc::invalid, "symmetric_eigen_smallest: matrix not square");
  require(m >= 1 && m <= n, errc::invalid, "symmetric_eigen_smallest: m out of range");
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  const double asymmetry = (M - M.transpose()).cwiseAbs().maxCoeff();
  require(asymmetry <= 1e-9 * scale, errc::invalid,
          "symmetric_eigen_smallest: input is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(M);
  require(solver.info() == Eigen::Success, errc::numeric,
          "symmetric_eigen_smallest: eigendecomposition failed");

  EigenPairs pairs;
  pairs.values = solver.eigenvalues().head(m);
  pairs.vectors.resize(n, m);
  for (Index j = 0; j < m; ++j) {
    Vector v = solver.eigenvectors().col(j);
    detail::fix_sign(v);
    pairs.vectors.col(j) = v;
  }
  return pairs;
}

/// Constrained least-squares weights reconstructing x from its neighbors:
/// minimizes ||x - sum_j w_j n_j||^2 subject to sum_j w_j = 1, through the
/// regularized local Gram system (G + reg * trace(G)/k * I) w = 1 followed
/// by sum normalization.
inline Vector reconstruction_weights(const Vector& x, const Matrix& neighbors,
                                     double reg_scale) {
  const Index k = neighbors.rows();
  require(k >= 1, errc::invalid, "reconstruction_weights: need at least one neighbor");
  require(neighbors.cols() == x.size(), errc::invalid,
          "reconstruction_weights: dimension mismatch");
  require(reg_scale >= 0.0, errc::invalid, "reconstruction_weights: negative regularization");

  Matrix displacement = (-neighbors).rowwise() + x.transpose();  // row j = x - n_j
  Matrix gram = displacement * displacement.transpose();
  const double trace = gram.trace();
  if (trace == 0.0) {
    // Every neighbor coincides with x; all unit-sum weights reconstruct exactly.
    return Vector::Constant(k, 1.0 / static_cast<double>(k));
  }
  gram.diagonal().array() += reg_scale * trace / static_cast<double>(k);

  Vector ones = Vector::Ones(k);
  Vector w = gram.ldlt().solve(ones);
  const double residual = (gram * w - ones).cwiseAbs().maxCoeff();
  if (!w.allFinite() || residual > 1e-6 * static_cast<double>(k))
    raise(errc::numeric, "reconstruction_weights: singular Gram system (reg_scale too small)");

  const double sum = w.sum();
  if (sum == 0.0 || !std::isfinite(sum))
    raise(errc::numeric, "reconstruction_weights: weights do not normalize");
  return w / sum;
}

/// Sample Pearson correlation coefficient.
inline double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  require(xs.size() == ys.size(), errc::invalid, "pearson: length mismatch");
  const std::size_t n = xs.size();
  require(n >= 2, errc::invalid, "pearson: need at least 2 observations");

  const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mean_x, dy = ys[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  require(sxx > 0.0 && syy > 0.0, errc::numeric, "pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Fractional (average) ranks, 1-based; ties share the mean of their ranks.
inline std::vector<double> fractional_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&values](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

/// Spearman rank correlation: Pearson on fractional ranks.
inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  require(xs.size() == ys.size(), errc::invalid, "spearman: length mismatch");
  require(xs.size() >= 2, errc::invalid, "spearman: need at least 2 observations");
  const auto all_equal = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&v](double x) { return x == v.front(); });
  };
  require(!all_equal(xs) && !all_equal(ys), errc::numeric, "spearman: constant input list");
  return pearson(fractional_ranks(xs), fractional_ranks(ys));
}

}  // namespace wordbias
