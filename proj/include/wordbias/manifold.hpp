#pragma once

#include "wordbias/embedding.hpp"
#include "wordbias/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace wordbias {

/// Hyper-parameters of the manifold re-embedding step. `out_dim == 0` keeps
/// the input dimensionality (the "dimensionality retention" default).
struct MdrConfig {
  std::size_t window_start = 5000;
  std::size_t window_length = 1000;
  std::size_t lle_neighbors = 20;
  std::size_t out_dim = 0;
  double reg_scale = 1e-3;
};

/// Fitted locally-linear-embedding state: the sample window in the original
/// space and its embedded coordinates, column j of `sample_embedded` being
/// the j-th smallest non-constant eigenvector of (I-W)^T (I-W), scaled by
/// sqrt(L).
struct ManifoldModel {
  MdrConfig config;  // out_dim resolved to the actual output dimension
  Matrix sample_originals;  // L x d
  Matrix sample_embedded;   // L x d'

  std::size_t sample_size() const { return static_cast<std::size_t>(sample_originals.rows()); }
  Index input_dim() const { return sample_originals.cols(); }
  Index output_dim() const { return sample_embedded.cols(); }
};

namespace detail {

/// Indices of the k nearest rows of `points` to `x` by Euclidean distance,
/// ties toward the lower index. `skip` excludes one row (the point itself
/// during fitting); pass a negative value to consider every row.
inline std::vector<Index> k_nearest_rows(const Matrix& points, const Vector& x, std::size_t k,
                                         Index skip = -1) {
  const Index n = points.rows();
  Vector dist2(n);
  for (Index j = 0; j < n; ++j)
    dist2(j) = (points.row(j).transpose() - x).squaredNorm();

  std::vector<Index> order;
  order.reserve(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j)
    if (j != skip) order.push_back(j);
  require(order.size() >= k, errc::invalid, "k_nearest_rows: not enough candidate points");
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&dist2](Index a, Index b) {
                      if (dist2(a) != dist2(b)) return dist2(a) < dist2(b);
                      return a < b;
                    });
  order.resize(k);
  return order;
}

}  // namespace detail

/// Fits LLE on the frequency window [S, S+L): per-point neighbor weights,
/// then the bottom eigenvectors of M = (I-W)^T (I-W) with the constant
/// eigenvector discarded.
inline ManifoldModel fit_mdr(const EmbeddingSpace& space, MdrConfig config) {
  const std::size_t L = config.window_length;
  const std::size_t k = config.lle_neighbors;
  require(L >= 2, errc::invalid, "fit_mdr: window_length must be at least 2");
  require(k >= 1 && k < L, errc::invalid, "fit_mdr: lle_neighbors must satisfy 1 <= k < L");
  if (config.out_dim == 0) config.out_dim = static_cast<std::size_t>(space.dim());
  require(config.out_dim <= L - 1, errc::invalid, "fit_mdr: out_dim must be at most L - 1");
  const auto window = frequency_window(space, config.window_start, L);

  ManifoldModel model;
  model.config = config;
  model.sample_originals.resize(static_cast<Index>(L), space.dim());
  for (std::size_t i = 0; i < L; ++i)
    model.sample_originals.row(static_cast<Index>(i)) =
        space.matrix.row(static_cast<Index>(window[i]));

  // I - W, with row i's neighbor weights subtracted at their columns
  Matrix a = Matrix::Identity(static_cast<Index>(L), static_cast<Index>(L));
  for (Index i = 0; i < static_cast<Index>(L); ++i) {
    const Vector x = model.sample_originals.row(i).transpose();
    const auto neighbors = detail::k_nearest_rows(model.sample_originals, x, k, i);
    Matrix neighbor_rows(static_cast<Index>(k), space.dim());
    for (std::size_t j = 0; j < k; ++j)
      neighbor_rows.row(static_cast<Index>(j)) = model.sample_originals.row(neighbors[j]);
    const Vector w = reconstruction_weights(x, neighbor_rows, config.reg_scale);
    for (std::size_t j = 0; j < k; ++j) a(i, neighbors[j]) -= w(static_cast<Index>(j));
  }

  Matrix m = a.transpose() * a;
  m = 0.5 * (m + m.transpose());  // clear round-off asymmetry before the eigensolve

  const Index d_out = static_cast<Index>(config.out_dim);
  const EigenPairs pairs = symmetric_eigen_smallest(m, d_out + 1);
  // column 0 is the constant eigenvector at eigenvalue ~0; drop it
  model.sample_embedded = pairs.vectors.rightCols(d_out) * std::sqrt(static_cast<double>(L));
  return model;
}

/// Out-of-sample extension: reconstruct x from its nearest sample points and
/// carry the weights into the embedded coordinates.
inline Vector transform(const ManifoldModel& model, const Vector& x) {
  require(x.size() == model.input_dim(), errc::invalid, "transform: dimension mismatch");
  const std::size_t k = model.config.lle_neighbors;
  const auto neighbors = detail::k_nearest_rows(model.sample_originals, x, k);
  Matrix neighbor_rows(static_cast<Index>(k), model.input_dim());
  for (std::size_t j = 0; j < k; ++j)
    neighbor_rows.row(static_cast<Index>(j)) = model.sample_originals.row(neighbors[j]);
  const Vector w = reconstruction_weights(x, neighbor_rows, model.config.reg_scale);

  Vector y = Vector::Zero(model.output_dim());
  for (std::size_t j = 0; j < k; ++j)
    y += w(static_cast<Index>(j)) * model.sample_embedded.row(neighbors[j]).transpose();
  return y;
}

/// Re-embeds every word of the space, preserving vocabulary order.
inline EmbeddingSpace transform_space(const ManifoldModel& model, const EmbeddingSpace& space) {
  require(space.dim() == model.input_dim(), errc::invalid,
          "transform_space: embedding dimension does not match the model");
  EmbeddingSpace result;
  result.vocab = space.vocab;
  result.matrix.resize(space.matrix.rows(), model.output_dim());
  result.normalized = false;
  for (Index i = 0; i < space.matrix.rows(); ++i)
    result.matrix.row(i) = transform(model, space.matrix.row(i).transpose()).transpose();
  return result;
}

/// Model file layout: a key/value config header followed by the two matrices
/// as rows of decimal floats (17 significant digits, lossless round-trip).
inline void save_manifold_model(const ManifoldModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) raise(errc::io, "cannot open model file for writing: " + path);
  out << "wordbias-manifold-model 1\n";
  out << "window_start " << model.config.window_start << "\n";
  out << "window_length " << model.config.window_length << "\n";
  out << "lle_neighbors " << model.config.lle_neighbors << "\n";
  out << "out_dim " << model.config.out_dim << "\n";
  out << "reg_scale " << format_double(model.config.reg_scale, 17) << "\n";

  const auto write_matrix = [&out, &path](const char* name, const Matrix& matrix) {
    out << name << " " << matrix.rows() << " " << matrix.cols() << "\n";
    std::string line;
    for (Index i = 0; i < matrix.rows(); ++i) {
      line.clear();
      for (Index j = 0; j < matrix.cols(); ++j) {
        if (j > 0) line += ' ';
        line += format_double(matrix(i, j), 17);
      }
      line += '\n';
      out << line;
    }
    if (!out) raise(errc::io, "write failed: " + path);
  };
  write_matrix("sample_originals", model.sample_originals);
  write_matrix("sample_embedded", model.sample_embedded);
}

inline ManifoldModel load_manifold_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(errc::io, "cannot open model file: " + path);
  const auto fail = [&path](const std::string& what) {
    raise(errc::format, path + ": " + what);
  };

  std::string key;
  int version = 0;
  in >> key >> version;
  if (!in || key != "wordbias-manifold-model" || version != 1)
    fail("not a wordbias manifold model file");

  ManifoldModel model;
  const auto read_sized = [&](const char* expected, auto& value) {
    in >> key >> value;
    if (!in || key != expected) fail(std::string("expected '") + expected + "' entry");
  };
  read_sized("window_start", model.config.window_start);
  read_sized("window_length", model.config.window_length);
  read_sized("lle_neighbors", model.config.lle_neighbors);
  read_sized("out_dim", model.config.out_dim);
  read_sized("reg_scale", model.config.reg_scale);

  const auto read_matrix = [&](const char* name, Matrix& matrix) {
    Index rows = 0, cols = 0;
    in >> key >> rows >> cols;
    if (!in || key != name || rows < 0 || cols <= 0)
      fail(std::string("expected '") + name + "' matrix header");
    matrix.resize(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j)
        if (!(in >> matrix(i, j))) fail(std::string("truncated '") + name + "' matrix");
  };
  read_matrix("sample_originals", model.sample_originals);
  read_matrix("sample_embedded", model.sample_embedded);

  if (model.sample_embedded.rows() != model.sample_originals.rows())
    fail("matrix row counts disagree");
  if (static_cast<std::size_t>(model.sample_embedded.cols()) != model.config.out_dim)
    fail("embedded width disagrees with out_dim");
  return model;
}

}  // namespace wordbias
