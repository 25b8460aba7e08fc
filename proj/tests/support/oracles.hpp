// Independent reference implementations used only to verify the library.
// Each oracle deliberately avoids the code path it checks.
#pragma once

#include "wordbias/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace oracle {

using wordbias::Index;
using wordbias::Matrix;
using wordbias::Vector;

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // columns
};

/// Cyclic Jacobi rotations on a symmetric matrix; no characteristic
/// polynomial, no library eigensolver.
inline EigenDecomposition jacobi_eigen(Matrix a, int max_sweeps = 100) {
  const Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-26) break;

    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index i = 0; i < n; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (Index i = 0; i < n; ++i) {
          const double api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&a](Index i, Index j) { return a(i, i) < a(j, j); });

  EigenDecomposition result;
  result.values.resize(n);
  result.vectors.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    result.values(j) = a(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(j)]);
    result.vectors.col(j) = v.col(order[static_cast<std::size_t>(j)]);
  }
  return result;
}

/// Sample covariance by explicit loops (n-1 denominator).
inline Matrix covariance_by_loops(const Matrix& points) {
  const Index n = points.rows(), d = points.cols();
  Vector mean = Vector::Zero(d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) mean(j) += points(i, j);
  mean /= static_cast<double>(n);

  Matrix cov = Matrix::Zero(d, d);
  for (Index i = 0; i < n; ++i)
    for (Index a = 0; a < d; ++a)
      for (Index b = 0; b < d; ++b)
        cov(a, b) += (points(i, a) - mean(a)) * (points(i, b) - mean(b));
  return cov / static_cast<double>(n - 1);
}

/// Eigenvalues of a symmetric 3x3 matrix from the characteristic cubic
/// (trigonometric solution), ascending; eigenvectors from cross products.
inline EigenDecomposition eig3_closed_form(const Matrix& m) {
  const double p1 = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
  const double q = m.trace() / 3.0;
  const double p2 = (m(0, 0) - q) * (m(0, 0) - q) + (m(1, 1) - q) * (m(1, 1) - q) +
                    (m(2, 2) - q) * (m(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);

  EigenDecomposition result;
  result.values.resize(3);
  if (p == 0.0) {
    result.values.setConstant(q);
    result.vectors = Matrix::Identity(3, 3);
    return result;
  }
  Matrix b = (m - q * Matrix::Identity(3, 3)) / p;
  const double detb = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                      b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                      b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
  const double phi = std::acos(std::clamp(detb / 2.0, -1.0, 1.0)) / 3.0;

  const double eig_hi = q + 2.0 * p * std::cos(phi);
  const double eig_lo = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  const double eig_mid = 3.0 * q - eig_hi - eig_lo;
  result.values << eig_lo, eig_mid, eig_hi;

  result.vectors.resize(3, 3);
  for (Index j = 0; j < 3; ++j) {
    const Matrix a = m - result.values(j) * Matrix::Identity(3, 3);
    // the eigenvector spans the null space: take the largest cross product
    // of two rows of (M - lambda I)
    Vector best = Vector::Zero(3);
    double best_norm = -1.0;
    for (Index r1 = 0; r1 < 3; ++r1) {
      for (Index r2 = r1 + 1; r2 < 3; ++r2) {
        Eigen::Vector3d u = a.row(r1).transpose();
        Eigen::Vector3d w = a.row(r2).transpose();
        Eigen::Vector3d cross = u.cross(w);
        if (cross.norm() > best_norm) {
          best_norm = cross.norm();
          best = cross;
        }
      }
    }
    result.vectors.col(j) = best / best.norm();
  }
  return result;
}

/// Dual SVM objective for given coefficients.
inline double dual_objective(const Matrix& x, const std::vector<int>& y, const Vector& alpha,
                             double gamma) {
  const Index n = x.rows();
  double quad = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const double k = std::exp(-gamma * (x.row(i) - x.row(j)).squaredNorm());
      quad += alpha(i) * alpha(j) * y[static_cast<std::size_t>(i)] *
              y[static_cast<std::size_t>(j)] * k;
    }
  return alpha.sum() - 0.5 * quad;
}

/// Projected-gradient ascent on the SVM dual: box constraints handled by
/// clipping, the equality constraint sum(alpha_i y_i) = 0 by a bisection on
/// its multiplier inside the projection.
inline Vector projected_gradient_svm(const Matrix& x, const std::vector<int>& y, double c,
                                     double gamma, int iterations = 200000) {
  const Index n = x.rows();
  Matrix q(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      q(i, j) = y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)] *
                std::exp(-gamma * (x.row(i) - x.row(j)).squaredNorm());

  const auto project = [&](Vector a) {
    double lo = -1e6, hi = 1e6;
    const auto balance = [&](double nu) {
      double s = 0.0;
      for (Index i = 0; i < n; ++i) {
        const double yi = y[static_cast<std::size_t>(i)];
        s += yi * std::clamp(a(i) - nu * yi, 0.0, c);
      }
      return s;
    };
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (balance(mid) > 0.0 ? lo : hi) = mid;
    }
    const double nu = 0.5 * (lo + hi);
    for (Index i = 0; i < n; ++i)
      a(i) = std::clamp(a(i) - nu * y[static_cast<std::size_t>(i)], 0.0, c);
    return a;
  };

  const double step = 1.0 / std::max(1.0, q.operatorNorm());
  Vector alpha = project(Vector::Zero(n));
  for (int it = 0; it < iterations; ++it) {
    const Vector gradient = Vector::Ones(n) - q * alpha;
    alpha = project(alpha + step * gradient);
  }
  return alpha;
}

/// Globally optimal 2-partition inertia by exhausting all 2^(n-1)-1 splits.
inline double best_two_partition_inertia(const Matrix& points) {
  const Index n = points.rows();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask + 1 < (1ULL << (n - 1)) * 2; ++mask) {
    // point 0 fixed on side 0 would halve the space; iterating all nonempty
    // proper subsets is simpler and still exact
    if (mask == (1ULL << n) - 1) continue;
    Vector mean0 = Vector::Zero(points.cols()), mean1 = Vector::Zero(points.cols());
    Index n0 = 0, n1 = 0;
    for (Index i = 0; i < n; ++i) {
      if (mask & (1ULL << i)) {
        mean1 += points.row(i).transpose();
        ++n1;
      } else {
        mean0 += points.row(i).transpose();
        ++n0;
      }
    }
    mean0 /= static_cast<double>(n0);
    mean1 /= static_cast<double>(n1);
    double inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      const Vector& mean = (mask & (1ULL << i)) ? mean1 : mean0;
      inertia += (points.row(i).transpose() - mean).squaredNorm();
    }
    best = std::min(best, inertia);
  }
  return best;
}

/// Trustworthiness of an embedding at neighborhood size k (Venna & Kaski):
/// penalizes embedded-space neighbors that were not original-space neighbors
/// by their original rank excess.
inline double trustworthiness(const Matrix& original, const Matrix& embedded, std::size_t k) {
  const Index n = original.rows();
  const auto ranked_neighbors = [n](const Matrix& m, Index i) {
    std::vector<Index> order;
    order.reserve(static_cast<std::size_t>(n) - 1);
    for (Index j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::sort(order.begin(), order.end(), [&m, i](Index a, Index b) {
      const double da = (m.row(a) - m.row(i)).squaredNorm();
      const double db = (m.row(b) - m.row(i)).squaredNorm();
      if (da != db) return da < db;
      return a < b;
    });
    return order;
  };

  double penalty = 0.0;
  for (Index i = 0; i < n; ++i) {
    const auto orig_order = ranked_neighbors(original, i);
    const auto emb_order = ranked_neighbors(embedded, i);
    std::vector<std::size_t> orig_rank(static_cast<std::size_t>(n), 0);
    for (std::size_t r = 0; r < orig_order.size(); ++r)
      orig_rank[static_cast<std::size_t>(orig_order[r])] = r + 1;

    std::vector<char> in_orig_knn(static_cast<std::size_t>(n), 0);
    for (std::size_t r = 0; r < k; ++r) in_orig_knn[static_cast<std::size_t>(orig_order[r])] = 1;
    for (std::size_t r = 0; r < k; ++r) {
      const Index j = emb_order[r];
      if (!in_orig_knn[static_cast<std::size_t>(j)])
        penalty += static_cast<double>(orig_rank[static_cast<std::size_t>(j)] - k);
    }
  }
  const double nk = static_cast<double>(n) * static_cast<double>(k);
  const double denom = nk * (2.0 * static_cast<double>(n) - 3.0 * static_cast<double>(k) - 1.0);
  return 1.0 - 2.0 / denom * penalty;
}

}  // namespace oracle
