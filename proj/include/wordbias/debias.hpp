#pragma once

#include "wordbias/embedding.hpp"
#include "wordbias/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

namespace wordbias {

struct SeedPairProvenance {
  std::string word_a;
  std::string word_b;
};

struct ClusterPcaProvenance {
  std::size_t k;
};

/// A unit vector in embedding space along which bias is measured or removed,
/// together with how it was derived.
struct BiasDirection {
  Vector direction;
  std::variant<SeedPairProvenance, ClusterPcaProvenance> provenance;
};

/// Normalized difference of two word vectors, the seed-pair bias axis.
inline BiasDirection bias_direction(const EmbeddingSpace& space, const std::string& a,
                                    const std::string& b) {
  require(a != b, errc::invalid, "bias_direction: seed words must differ");
  const Vector va = space.vector(a);
  const Vector vb = space.vector(b);
  Vector diff = va - vb;
  const double norm = diff.norm();
  require(norm > 0.0, errc::numeric,
          "bias_direction: '" + a + "' and '" + b + "' have identical vectors");
  return {diff / norm, SeedPairProvenance{a, b}};
}

/// Signed projection of every vocabulary word onto the direction.
inline Vector directional_bias_scores(const EmbeddingSpace& space, const BiasDirection& dir) {
  require(dir.direction.size() == space.dim(), errc::invalid,
          "directional_bias_scores: dimension mismatch");
  return space.matrix * dir.direction;
}

struct BiasedWordEntry {
  std::size_t index;
  std::string word;
  double score;  // signed projection onto the bias direction
};

/// The k most biased words on each side of a direction. side_a scores are
/// all >= 0, side_b all <= 0; both lists are sorted by |score| descending.
struct BiasedWordSet {
  std::vector<BiasedWordEntry> side_a;
  std::vector<BiasedWordEntry> side_b;
  std::size_t k = 0;
};

enum class BiasRanking {
  projection,      // rank by |signed projection| (default)
  seed_neighbors,  // rank by cosine to the seed words, sign-gated
};

/// Selects the k top-biased words per side, excluding the seed words
/// themselves. Ties break toward the lower vocabulary index.
inline BiasedWordSet top_k_biased(const EmbeddingSpace& space, const BiasDirection& dir,
                                  std::size_t k,
                                  BiasRanking ranking = BiasRanking::projection) {
  require(k >= 1, errc::invalid, "top_k_biased: k must be positive");
  const Vector scores = directional_bias_scores(space, dir);

  std::unordered_set<std::size_t> seed_indices;
  if (const auto* seed = std::get_if<SeedPairProvenance>(&dir.provenance)) {
    if (auto i = space.vocab.find(seed->word_a)) seed_indices.insert(*i);
    if (auto i = space.vocab.find(seed->word_b)) seed_indices.insert(*i);
  }

  // rank key per side: projection magnitude, or cosine to the seed word
  Vector key_a = scores, key_b = -scores;
  if (ranking == BiasRanking::seed_neighbors) {
    const auto* seed = std::get_if<SeedPairProvenance>(&dir.provenance);
    require(seed != nullptr, errc::invalid,
            "top_k_biased: seed_neighbors ranking needs a seed-pair direction");
    const Vector va = space.vector(seed->word_a);
    const Vector vb = space.vector(seed->word_b);
    key_a = space.matrix * (va / va.norm());
    key_b = space.matrix * (vb / vb.norm());
    if (!space.normalized) {
      for (Index i = 0; i < key_a.size(); ++i) {
        const double norm = space.matrix.row(i).norm();
        require(norm > 0.0, errc::numeric, "top_k_biased: zero-norm row");
        key_a(i) /= norm;
        key_b(i) /= norm;
      }
    }
  }

  const auto select_side = [&](const Vector& key, bool positive) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < space.size(); ++i) {
      if (seed_indices.count(i)) continue;
      const double s = scores(static_cast<Index>(i));
      if (positive ? s > 0.0 : s < 0.0) candidates.push_back(i);
    }
    require(candidates.size() >= k, errc::invalid,
            std::string("top_k_biased: fewer than k words biased toward side ") +
                (positive ? "a" : "b"));
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                      candidates.end(), [&key](std::size_t x, std::size_t y) {
                        const double kx = key(static_cast<Index>(x));
                        const double ky = key(static_cast<Index>(y));
                        if (kx != ky) return kx > ky;
                        return x < y;
                      });
    candidates.resize(k);
    std::vector<BiasedWordEntry> side;
    side.reserve(k);
    for (const std::size_t i : candidates)
      side.push_back({i, space.vocab.word(i), scores(static_cast<Index>(i))});
    std::sort(side.begin(), side.end(), [](const BiasedWordEntry& x, const BiasedWordEntry& y) {
      const double ax = std::abs(x.score), ay = std::abs(y.score);
      if (ax != ay) return ax > ay;
      return x.index < y.index;
    });
    return side;
  };

  BiasedWordSet result;
  result.side_a = select_side(key_a, true);
  result.side_b = select_side(key_b, false);
  result.k = k;
  return result;
}

/// First principal component of the 2k selected word vectors (mean-centered
/// PCA), the data-driven direction actually removed by cluster debiasing.
inline BiasDirection cluster_debias_direction(const EmbeddingSpace& space,
                                              const BiasedWordSet& biased) {
  const std::size_t total = biased.side_a.size() + biased.side_b.size();
  require(total >= 2, errc::invalid, "cluster_debias_direction: need at least 2 vectors");

  Matrix points(static_cast<Index>(total), space.dim());
  Index row = 0;
  for (const auto& entry : biased.side_a)
    points.row(row++) = space.matrix.row(static_cast<Index>(entry.index));
  for (const auto& entry : biased.side_b)
    points.row(row++) = space.matrix.row(static_cast<Index>(entry.index));

  const PcaModel pca = principal_components(points, 1);
  require(pca.explained_variance(0) > 0.0, errc::numeric,
          "cluster_debias_direction: selected vectors have zero variance");
  return {pca.components.row(0).transpose(), ClusterPcaProvenance{biased.k}};
}

/// Removes the direction's component from every non-excluded word:
/// row' = row - <row, d> d. Vectors are not re-normalized.
inline EmbeddingSpace remove_direction(const EmbeddingSpace& space, const BiasDirection& dir,
                                       const std::unordered_set<std::string>& exclude = {}) {
  require(dir.direction.size() == space.dim(), errc::invalid,
          "remove_direction: dimension mismatch");
  require(std::abs(dir.direction.norm() - 1.0) <= 1e-9, errc::invalid,
          "remove_direction: direction is not unit length");

  std::vector<char> keep(space.size(), 0);
  for (const auto& word : exclude)
    if (auto i = space.vocab.find(word)) keep[*i] = 1;

  EmbeddingSpace result;
  result.vocab = space.vocab;
  result.matrix = space.matrix;
  result.normalized = false;
  const Vector& d = dir.direction;
  for (Index i = 0; i < result.matrix.rows(); ++i) {
    if (keep[static_cast<std::size_t>(i)]) continue;
    const double projection = result.matrix.row(i).dot(d);
    result.matrix.row(i) -= projection * d.transpose();
  }
  return result;
}

struct HardDebiasStats {
  std::size_t usable_definitional_pairs = 0;
  std::size_t skipped_definitional_pairs = 0;
  std::size_t neutralized = 0;
  std::size_t equalized_pairs = 0;
  std::size_t skipped_equalize_pairs = 0;
};

/// The neutralize-and-equalize baseline. The gender direction is the first
/// principal component of the per-pair centered definitional vectors; words
/// outside `gender_specific` are projected off it and re-normalized; each
/// equalize pair is recentered to nu +/- sqrt(1 - |nu|^2) d with the original
/// side of each word preserved.
inline EmbeddingSpace hard_debias(const EmbeddingSpace& space,
                                  const std::vector<std::pair<std::string, std::string>>& definitional_pairs,
                                  const std::vector<std::pair<std::string, std::string>>& equalize_pairs,
                                  const std::unordered_set<std::string>& gender_specific,
                                  HardDebiasStats* stats = nullptr) {
  require(space.normalized, errc::invalid, "hard_debias: space must be row-normalized");

  HardDebiasStats local;
  std::vector<std::pair<std::size_t, std::size_t>> usable;
  for (const auto& [a, b] : definitional_pairs) {
    const auto ia = space.vocab.find(a);
    const auto ib = space.vocab.find(b);
    if (ia && ib) {
      usable.emplace_back(*ia, *ib);
    } else {
      ++local.skipped_definitional_pairs;
    }
  }
  local.usable_definitional_pairs = usable.size();
  require(!usable.empty(), errc::invalid, "hard_debias: no usable definitional pairs");

  Matrix centered(static_cast<Index>(2 * usable.size()), space.dim());
  Index row = 0;
  for (const auto& [ia, ib] : usable) {
    const Vector va = space.matrix.row(static_cast<Index>(ia)).transpose();
    const Vector vb = space.matrix.row(static_cast<Index>(ib)).transpose();
    const Vector mu = 0.5 * (va + vb);
    centered.row(row++) = (va - mu).transpose();
    centered.row(row++) = (vb - mu).transpose();
  }
  const PcaModel pca = principal_components(centered, 1);
  require(pca.explained_variance(0) > 0.0, errc::numeric,
          "hard_debias: definitional pairs define no direction");
  const Vector d = pca.components.row(0).transpose();

  EmbeddingSpace result;
  result.vocab = space.vocab;
  result.matrix = space.matrix;
  result.normalized = true;

  for (Index i = 0; i < result.matrix.rows(); ++i) {
    const auto& word = space.vocab.word(static_cast<std::size_t>(i));
    if (gender_specific.count(word)) continue;
    Vector v = result.matrix.row(i).transpose();
    v -= v.dot(d) * d;
    const double norm = v.norm();
    require(norm > 0.0, errc::numeric,
            "hard_debias: '" + word + "' lies entirely on the gender direction");
    result.matrix.row(i) = (v / norm).transpose();
    ++local.neutralized;
  }

  for (const auto& [a, b] : equalize_pairs) {
    const auto ia = space.vocab.find(a);
    const auto ib = space.vocab.find(b);
    if (!ia || !ib) {
      ++local.skipped_equalize_pairs;
      continue;
    }
    const Vector va = space.matrix.row(static_cast<Index>(*ia)).transpose();
    const Vector vb = space.matrix.row(static_cast<Index>(*ib)).transpose();
    const Vector mu = 0.5 * (va + vb);
    const Vector nu = mu - mu.dot(d) * d;
    double z = std::sqrt(std::max(0.0, 1.0 - nu.squaredNorm()));
    if ((va - vb).dot(d) < 0.0) z = -z;
    result.matrix.row(static_cast<Index>(*ia)) = (nu + z * d).transpose();
    result.matrix.row(static_cast<Index>(*ib)) = (nu - z * d).transpose();
    ++local.equalized_pairs;
  }

  if (stats != nullptr) *stats = local;
  return result;
}

}  // namespace wordbias
