#pragma once

#include "wordbias/core.hpp"

#include <limits>
#include <vector>

namespace wordbias {

struct KmeansResult {
  std::vector<int> assignments;
  double inertia = 0.0;
  Matrix centroids;
  int iterations = 0;
};

namespace detail {

inline Index kmeanspp_pick(const Vector& weights, double total, Rng& rng) {
  const double target = rng.next_double() * total;
  double cumulative = 0.0;
  for (Index i = 0; i < weights.size(); ++i) {
    cumulative += weights(i);
    if (target < cumulative) return i;
  }
  return weights.size() - 1;  // guard against round-off at the top end
}

inline KmeansResult kmeans_single(const Matrix& points, int k, std::uint64_t seed,
                                  int max_iterations) {
  const Index n = points.rows();
  Rng rng(seed);

  // kmeans++ seeding
  Matrix centroids(k, points.cols());
  centroids.row(0) = points.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
  Vector dist2 = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    Index pick;
    if (total > 0.0) {
      pick = kmeanspp_pick(dist2, total, rng);
    } else {
      pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centroids.row(c) = points.row(pick);
    dist2 = dist2.cwiseMin((points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> assignments(static_cast<std::size_t>(n), -1);
  Vector point_cost(n);
  int iteration = 0;
  for (; iteration < max_iterations; ++iteration) {
    // assignment step; ties go to the lower centroid index
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points.row(i) - centroids.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (points.row(i) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      point_cost(i) = best_d;
      if (assignments[static_cast<std::size_t>(i)] != best) {
        assignments[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }

    // empty clusters grab the point that is currently worst represented
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(assignments[static_cast<std::size_t>(i)])];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Index farthest = 0;
      double farthest_d = -1.0;
      for (Index i = 0; i < n; ++i) {
        if (counts[static_cast<std::size_t>(assignments[static_cast<std::size_t>(i)])] <= 1) continue;
        if (point_cost(i) > farthest_d) {
          farthest_d = point_cost(i);
          farthest = i;
        }
      }
      --counts[static_cast<std::size_t>(assignments[static_cast<std::size_t>(farthest)])];
      assignments[static_cast<std::size_t>(farthest)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      point_cost(farthest) = 0.0;
      changed = true;
    }

    if (!changed && iteration > 0) break;

    // update step
    centroids.setZero();
    for (Index i = 0; i < n; ++i)
      centroids.row(assignments[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c)
      centroids.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
  }

  KmeansResult result;
  result.assignments = std::move(assignments);
  result.centroids = std::move(centroids);
  result.iterations = iteration;
  result.inertia = 0.0;
  for (Index i = 0; i < n; ++i)
    result.inertia +=
        (points.row(i) - result.centroids.row(result.assignments[static_cast<std::size_t>(i)]))
            .squaredNorm();
  return result;
}

}  // namespace detail

/// Lloyd's algorithm with kmeans++ initialization, best of `restarts` runs by
/// inertia. Fully deterministic for a given seed.
inline KmeansResult kmeans(const Matrix& points, int k, int restarts, std::uint64_t seed,
                           int max_iterations = 300) {
  require(k >= 1, errc::invalid, "kmeans: k must be positive");
  require(points.rows() >= k, errc::invalid, "kmeans: fewer points than clusters");
  require(restarts >= 1, errc::invalid, "kmeans: need at least one restart");

  KmeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    KmeansResult candidate =
        detail::kmeans_single(points, k, derive_seed(seed, static_cast<std::uint64_t>(r)),
                              max_iterations);
    if (candidate.inertia < best.inertia) best = std::move(candidate);
  }
  return best;
}

}  // namespace wordbias
