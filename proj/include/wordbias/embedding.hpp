#pragma once

#include "wordbias/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace wordbias {

/// Ordered vocabulary. Position is interpreted as descending corpus
/// frequency rank, exactly as the words appear in the source file.
class Vocabulary {
 public:
  Vocabulary() = default;

  static Vocabulary from_words(std::vector<std::string> words) {
    Vocabulary vocab;
    vocab.words_ = std::move(words);
    vocab.index_.reserve(vocab.words_.size());
    for (std::size_t i = 0; i < vocab.words_.size(); ++i) {
      auto [it, inserted] = vocab.index_.emplace(vocab.words_[i], i);
      if (!inserted) raise(errc::format, "duplicate word: " + vocab.words_[i]);
    }
    return vocab;
  }

  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const std::string& word(std::size_t i) const { return words_[i]; }

  bool contains(const std::string& word) const { return index_.count(word) != 0; }

  std::optional<std::size_t> find(const std::string& word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t at(const std::string& word) const {
    auto it = index_.find(word);
    if (it == index_.end()) raise(errc::missing_word, "word not in vocabulary: " + word);
    return it->second;
  }

  bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// A vocabulary plus its dense n x d vector matrix (row i belongs to word i).
/// Immutable after construction; operations return fresh spaces.
struct EmbeddingSpace {
  Vocabulary vocab;
  Matrix matrix;
  bool normalized = false;

  std::size_t size() const { return vocab.size(); }
  Index dim() const { return matrix.cols(); }

  Vector vector(const std::string& word) const {
    return matrix.row(static_cast<Index>(vocab.at(word))).transpose();
  }
};

inline double cosine(const Vector& a, const Vector& b) {
  const double na = a.norm(), nb = b.norm();
  require(na > 0.0 && nb > 0.0, errc::invalid, "cosine of a zero vector");
  return a.dot(b) / (na * nb);
}

namespace detail {

inline std::string_view trim_view(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

inline double parse_double(std::string_view token, const std::string& context) {
  double value = 0.0;
  const auto result = std::from_chars(token.data(), token.data() + token.size(), value);
  if (result.ec != std::errc() || result.ptr != token.data() + token.size())
    raise(errc::format, context + ": non-numeric token '" + std::string(token) + "'");
  if (!std::isfinite(value))
    raise(errc::format, context + ": non-finite value '" + std::string(token) + "'");
  return value;
}

}  // namespace detail

/// Loads a GloVe-format text file: one `word v1 v2 ... vd` line per word,
/// whitespace separated. Line order is preserved as frequency order.
inline EmbeddingSpace load_glove_text(const std::string& path,
                                      std::optional<Index> expected_dim = std::nullopt) {
  std::ifstream in(path);
  if (!in) raise(errc::io, "cannot open embedding file: " + path);

  std::vector<std::string> words;
  std::vector<double> values;
  Index dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = detail::trim_view(line);
    if (view.empty()) continue;
    const std::string context = path + ":" + std::to_string(line_no);

    const auto word_end = view.find_first_of(" \t");
    if (word_end == std::string_view::npos)
      raise(errc::format, context + ": expected word followed by vector components");
    words.emplace_back(view.substr(0, word_end));
    view.remove_prefix(word_end);

    Index count = 0;
    while (true) {
      const auto start = view.find_first_not_of(" \t");
      if (start == std::string_view::npos) break;
      view.remove_prefix(start);
      auto end = view.find_first_of(" \t");
      if (end == std::string_view::npos) end = view.size();
      values.push_back(detail::parse_double(view.substr(0, end), context));
      view.remove_prefix(end);
      ++count;
    }

    if (dim == 0) {
      dim = count;
      if (dim == 0) raise(errc::format, context + ": line has no vector components");
      if (expected_dim && dim != *expected_dim)
        raise(errc::format, context + ": dimension " + std::to_string(dim) +
                                " does not match expected " + std::to_string(*expected_dim));
    } else if (count != dim) {
      raise(errc::format, context + ": dimension " + std::to_string(count) +
                              " does not match first line's " + std::to_string(dim));
    }
  }
  if (words.empty()) raise(errc::format, path + ": empty embedding file");

  EmbeddingSpace space;
  space.vocab = Vocabulary::from_words(std::move(words));
  space.matrix = Eigen::Map<const Matrix>(values.data(), static_cast<Index>(space.vocab.size()), dim);
  space.normalized = false;
  return space;
}

/// Writes the space in the same text format, one word per line in vocabulary
/// order. Nine significant digits keep round-trips well within 1e-6.
inline void save_glove_text(const EmbeddingSpace& space, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) raise(errc::io, "cannot open output file: " + path);
  const Index d = space.dim();
  std::string line;
  for (std::size_t i = 0; i < space.size(); ++i) {
    line = space.vocab.word(i);
    for (Index j = 0; j < d; ++j) {
      line += ' ';
      line += format_double(space.matrix(static_cast<Index>(i), j), 9);
    }
    line += '\n';
    out << line;
  }
  if (!out) raise(errc::io, "write failed: " + path);
}

/// Returns a copy with every row scaled to unit L2 norm.
inline EmbeddingSpace normalize_rows(const EmbeddingSpace& space) {
  EmbeddingSpace result;
  result.vocab = space.vocab;
  result.matrix = space.matrix;
  for (Index i = 0; i < result.matrix.rows(); ++i) {
    const double norm = result.matrix.row(i).norm();
    if (norm <= 0.0)
      raise(errc::numeric, "zero-norm row for word: " + space.vocab.word(static_cast<std::size_t>(i)));
    result.matrix.row(i) /= norm;
  }
  result.normalized = true;
  return result;
}

struct ScoredWord {
  std::size_t index;
  std::string word;
  double cosine;
};

/// The k words with highest cosine similarity to `query`, descending, with
/// excluded words removed. Ties break toward the lower vocabulary index.
inline std::vector<ScoredWord> nearest_neighbors(
    const EmbeddingSpace& space, const Vector& query, std::size_t k,
    const std::unordered_set<std::string>& exclude = {}) {
  require(query.size() == space.dim(), errc::invalid, "nearest_neighbors: query dimension mismatch");
  const double query_norm = query.norm();
  require(query_norm > 0.0, errc::invalid, "nearest_neighbors: zero query vector");

  std::vector<char> excluded(space.size(), 0);
  std::size_t excluded_count = 0;
  for (const auto& word : exclude) {
    if (auto idx = space.vocab.find(word)) {
      if (!excluded[*idx]) ++excluded_count;
      excluded[*idx] = 1;
    }
  }
  require(k + excluded_count <= space.size(), errc::invalid,
          "nearest_neighbors: k exceeds available vocabulary");
  if (k == 0) return {};

  Vector scores = space.matrix * query / query_norm;
  if (!space.normalized) {
    for (Index i = 0; i < scores.size(); ++i) {
      const double norm = space.matrix.row(i).norm();
      require(norm > 0.0, errc::numeric,
              "nearest_neighbors: zero-norm row for word: " + space.vocab.word(static_cast<std::size_t>(i)));
      scores(i) /= norm;
    }
  }

  std::vector<std::size_t> order;
  order.reserve(space.size() - excluded_count);
  for (std::size_t i = 0; i < space.size(); ++i)
    if (!excluded[i]) order.push_back(i);

  const auto better = [&scores](std::size_t a, std::size_t b) {
    const double sa = scores(static_cast<Index>(a)), sb = scores(static_cast<Index>(b));
    if (sa != sb) return sa > sb;
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), better);

  std::vector<ScoredWord> result;
  result.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t i = order[r];
    result.push_back({i, space.vocab.word(i), scores(static_cast<Index>(i))});
  }
  return result;
}

/// Contiguous index range [start, start + length) in vocabulary (frequency)
/// order.
inline std::vector<std::size_t> frequency_window(const EmbeddingSpace& space,
                                                 std::size_t start, std::size_t length) {
  require(length > 0, errc::invalid, "frequency_window: length must be positive");
  require(start + length <= space.size(), errc::invalid,
          "frequency_window: window [" + std::to_string(start) + ", " +
              std::to_string(start + length) + ") exceeds vocabulary size " +
              std::to_string(space.size()));
  std::vector<std::size_t> indices(length);
  for (std::size_t i = 0; i < length; ++i) indices[i] = start + i;
  return indices;
}

}  // namespace wordbias
