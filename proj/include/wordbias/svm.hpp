#pragma once

#include "wordbias/core.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace wordbias {

/// Soft-margin RBF-kernel SVM trained by sequential minimal optimization.
struct SvmModel {
  Matrix support_vectors;     // training points (all of them; alpha may be 0)
  Vector alpha;               // dual coefficients, 0 <= alpha_i <= C
  std::vector<int> labels;    // +1 / -1
  double bias = 0.0;          // decision function f(x) = sum_i alpha_i y_i K(x_i, x) + bias
  double gamma = 1.0;
  double c = 1.0;
  bool converged = true;
  double max_kkt_violation = 0.0;
  int passes = 0;
};

/// The common "scale" heuristic: gamma = 1 / (d * mean feature variance),
/// with variance pooled over every matrix entry.
inline double rbf_gamma_scale(const Matrix& x) {
  require(x.rows() >= 1 && x.cols() >= 1, errc::invalid, "rbf_gamma_scale: empty matrix");
  const double mean = x.mean();
  const double variance = (x.array() - mean).square().mean();
  require(variance > 0.0, errc::numeric, "rbf_gamma_scale: zero feature variance");
  return 1.0 / (static_cast<double>(x.cols()) * variance);
}

inline double svm_decision(const SvmModel& model, const Vector& x) {
  require(x.size() == model.support_vectors.cols(), errc::invalid,
          "svm_decision: dimension mismatch");
  double f = model.bias;
  for (Index i = 0; i < model.support_vectors.rows(); ++i) {
    const double a = model.alpha(i);
    if (a == 0.0) continue;
    const double d2 = (model.support_vectors.row(i).transpose() - x).squaredNorm();
    f += a * model.labels[static_cast<std::size_t>(i)] * std::exp(-model.gamma * d2);
  }
  return f;
}

/// Sign of the decision function; exact zero deterministically maps to +1.
inline int svm_predict(const SvmModel& model, const Vector& x) {
  return svm_decision(model, x) >= 0.0 ? 1 : -1;
}

namespace detail {

/// Platt's SMO working state over a fully cached kernel matrix.
class SmoSolver {
 public:
  SmoSolver(const Matrix& x, const std::vector<int>& y, double c, double gamma, double tol)
      : x_(x), y_(y), c_(c), gamma_(gamma), tol_(tol), n_(x.rows()) {
    kernel_.resize(n_, n_);
    for (Index i = 0; i < n_; ++i) {
      kernel_(i, i) = 1.0;
      for (Index j = i + 1; j < n_; ++j) {
        const double d2 = (x_.row(i) - x_.row(j)).squaredNorm();
        const double k = std::exp(-gamma_ * d2);
        kernel_(i, j) = k;
        kernel_(j, i) = k;
      }
    }
    alpha_ = Vector::Zero(n_);
    // with all alpha at zero, f(x) = 0 and E_i = -y_i
    errors_.resize(n_);
    for (Index i = 0; i < n_; ++i) errors_(i) = -static_cast<double>(y_[static_cast<std::size_t>(i)]);
  }

  /// Runs the examine-all / examine-non-bound alternation until a full sweep
  /// changes nothing, or the pass budget runs out.
  void solve(int max_passes, SvmModel& out) {
    bool examine_all = true;
    int passes = 0;
    while (passes < max_passes) {
      ++passes;
      int changed = 0;
      for (Index i = 0; i < n_; ++i) {
        if (!examine_all && !is_unbound(i)) continue;
        changed += examine(i);
      }
      if (examine_all) {
        if (changed == 0) {
          out.converged = true;
          break;
        }
        examine_all = false;
      } else if (changed == 0) {
        examine_all = true;
      }
      out.converged = false;
    }
    out.alpha = alpha_;
    out.bias = b_;
    out.passes = passes;
    out.max_kkt_violation = max_violation();
  }

 private:
  bool is_unbound(Index i) const { return alpha_(i) > 0.0 && alpha_(i) < c_; }

  double max_violation() const {
    double worst = 0.0;
    for (Index i = 0; i < n_; ++i) {
      const double r = errors_(i) * y_[static_cast<std::size_t>(i)];
      double v = 0.0;
      if (alpha_(i) < c_) v = std::max(v, -r);  // wants to grow
      if (alpha_(i) > 0.0) v = std::max(v, r);  // wants to shrink
      worst = std::max(worst, v);
    }
    return worst;
  }

  int examine(Index i2) {
    const int y2 = y_[static_cast<std::size_t>(i2)];
    const double e2 = errors_(i2);
    const double r2 = e2 * y2;
    const bool violates = (r2 < -tol_ && alpha_(i2) < c_) || (r2 > tol_ && alpha_(i2) > 0.0);
    if (!violates) return 0;

    // second-choice heuristic: maximize |E1 - E2| over unbound points
    Index best = -1;
    double best_gap = -1.0;
    for (Index i = 0; i < n_; ++i) {
      if (!is_unbound(i)) continue;
      const double gap = std::abs(errors_(i) - e2);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best >= 0 && take_step(best, i2)) return 1;

    // deterministic fallback sweeps (unbound first, then everything)
    for (Index offset = 1; offset <= n_; ++offset) {
      const Index i1 = (i2 + offset) % n_;
      if (is_unbound(i1) && take_step(i1, i2)) return 1;
    }
    for (Index offset = 1; offset <= n_; ++offset) {
      const Index i1 = (i2 + offset) % n_;
      if (take_step(i1, i2)) return 1;
    }
    return 0;
  }

  bool take_step(Index i1, Index i2) {
    if (i1 == i2) return false;
    const double a1 = alpha_(i1), a2 = alpha_(i2);
    const int y1 = y_[static_cast<std::size_t>(i1)], y2 = y_[static_cast<std::size_t>(i2)];
    const double e1 = errors_(i1), e2 = errors_(i2);
    const double s = y1 * y2;

    double low, high;
    if (y1 != y2) {
      low = std::max(0.0, a2 - a1);
      high = std::min(c_, c_ + a2 - a1);
    } else {
      low = std::max(0.0, a1 + a2 - c_);
      high = std::min(c_, a1 + a2);
    }
    if (low >= high) return false;

    const double k11 = kernel_(i1, i1), k12 = kernel_(i1, i2), k22 = kernel_(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;
    double a2_new;
    if (eta > 0.0) {
      a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, low, high);
    } else {
      // flat or concave along the constraint: evaluate Platt's objective at
      // both clip ends and take the lower one
      const double f1 = y1 * (e1 - b_) - a1 * k11 - s * a2 * k12;
      const double f2 = y2 * (e2 - b_) - s * a1 * k12 - a2 * k22;
      const double l1 = a1 + s * (a2 - low);
      const double h1 = a1 + s * (a2 - high);
      const double obj_low = l1 * f1 + low * f2 + 0.5 * l1 * l1 * k11 + 0.5 * low * low * k22 +
                             s * low * l1 * k12;
      const double obj_high = h1 * f1 + high * f2 + 0.5 * h1 * h1 * k11 +
                              0.5 * high * high * k22 + s * high * h1 * k12;
      if (obj_low < obj_high - kEps)
        a2_new = low;
      else if (obj_low > obj_high + kEps)
        a2_new = high;
      else
        return false;
    }
    if (std::abs(a2_new - a2) < kEps * (a2_new + a2 + kEps)) return false;
    const double a1_new = a1 + s * (a2 - a2_new);

    // move the threshold so the updated point with an unbound alpha sits
    // exactly on its margin (f(x_i) = y_i); average when both are at bounds
    const double d1 = y1 * (a1_new - a1), d2 = y2 * (a2_new - a2);
    const double b1 = b_ - (e1 + d1 * k11 + d2 * k12);
    const double b2 = b_ - (e2 + d1 * k12 + d2 * k22);
    double b_new;
    if (a1_new > 0.0 && a1_new < c_)
      b_new = b1;
    else if (a2_new > 0.0 && a2_new < c_)
      b_new = b2;
    else
      b_new = 0.5 * (b1 + b2);
    const double db = b_new - b_;
    b_ = b_new;

    alpha_(i1) = a1_new;
    alpha_(i2) = a2_new;
    for (Index i = 0; i < n_; ++i)
      errors_(i) += d1 * kernel_(i1, i) + d2 * kernel_(i2, i) + db;
    return true;
  }

  static constexpr double kEps = 1e-5;

  const Matrix& x_;
  const std::vector<int>& y_;
  double c_, gamma_, tol_;
  Index n_;
  Matrix kernel_;
  Vector alpha_;
  Vector errors_;  // E_i = f(x_i) - y_i
  double b_ = 0.0;
};

}  // namespace detail

inline SvmModel svm_rbf_train(const Matrix& x, const std::vector<int>& y, double c, double gamma,
                              double tol = 1e-3, int max_passes = 2000) {
  require(x.rows() == static_cast<Index>(y.size()), errc::invalid,
          "svm_rbf_train: label count does not match point count");
  require(x.rows() >= 2, errc::invalid, "svm_rbf_train: need at least 2 points");
  require(c > 0.0 && gamma > 0.0 && tol > 0.0, errc::invalid,
          "svm_rbf_train: C, gamma and tol must be positive");
  bool has_pos = false, has_neg = false;
  for (const int label : y) {
    require(label == 1 || label == -1, errc::invalid, "svm_rbf_train: labels must be +1/-1");
    (label == 1 ? has_pos : has_neg) = true;
  }
  require(has_pos && has_neg, errc::invalid, "svm_rbf_train: both classes must be present");

  SvmModel model;
  model.support_vectors = x;
  model.labels = y;
  model.gamma = gamma;
  model.c = c;

  detail::SmoSolver solver(x, y, c, gamma, tol);
  solver.solve(max_passes, model);
  return model;
}

/// Dual objective value sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij,
/// mainly for convergence diagnostics and oracle comparisons.
inline double svm_dual_objective(const SvmModel& model) {
  const Index n = model.support_vectors.rows();
  double quad = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (model.alpha(i) == 0.0) continue;
    for (Index j = 0; j < n; ++j) {
      if (model.alpha(j) == 0.0) continue;
      const double d2 = (model.support_vectors.row(i) - model.support_vectors.row(j)).squaredNorm();
      quad += model.alpha(i) * model.alpha(j) * model.labels[static_cast<std::size_t>(i)] *
              model.labels[static_cast<std::size_t>(j)] * std::exp(-model.gamma * d2);
    }
  }
  return model.alpha.sum() - 0.5 * quad;
}

}  // namespace wordbias
