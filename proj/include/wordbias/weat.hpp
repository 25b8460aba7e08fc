#pragma once

#include "wordbias/embedding.hpp"
#include "wordbias/numeric.hpp"
#include "wordbias/wordlists.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>
#include <vector>

namespace wordbias {

/// One word-embedding association test: two target word sets X/Y and two
/// attribute word sets A/B.
struct WeatSpec {
  std::string name;
  std::vector<std::string> targets_x;
  std::vector<std::string> targets_y;
  std::vector<std::string> attributes_a;
  std::vector<std::string> attributes_b;
};

/// Enforces the curated-spec invariants: equal target sizes >= 2, non-empty
/// attributes, and pairwise disjoint sets.
inline void validate_weat_spec(const WeatSpec& spec) {
  require(spec.targets_x.size() == spec.targets_y.size(), errc::resource,
          "weat spec '" + spec.name + "': target sets must have equal size");
  require(spec.targets_x.size() >= 2, errc::resource,
          "weat spec '" + spec.name + "': target sets need at least 2 words");
  require(!spec.attributes_a.empty() && !spec.attributes_b.empty(), errc::resource,
          "weat spec '" + spec.name + "': attribute sets must be non-empty");

  const std::vector<const std::vector<std::string>*> sets = {
      &spec.targets_x, &spec.targets_y, &spec.attributes_a, &spec.attributes_b};
  std::unordered_set<std::string> seen;
  for (const auto* set : sets) {
    for (const auto& word : *set) {
      if (!seen.insert(word).second)
        raise(errc::resource, "weat spec '" + spec.name + "': sets are not disjoint ('" + word + "')");
    }
  }
}

/// Spec file format: labeled sections `targets_x:`, `targets_y:`,
/// `attributes_a:`, `attributes_b:` (plus optional `name:`), each followed by
/// whitespace-separated words on the same and/or subsequent lines.
inline WeatSpec load_weat_spec(const std::string& path) {
  WeatSpec spec;
  std::vector<std::string>* current = nullptr;
  detail::for_each_data_line(path, [&](std::string_view line, std::size_t line_no) {
    auto tokens = detail::split_tokens(line);
    std::size_t start = 0;
    if (!tokens.empty() && tokens[0].back() == ':') {
      const std::string label = tokens[0].substr(0, tokens[0].size() - 1);
      if (label == "name") {
        if (tokens.size() != 2)
          raise(errc::format, path + ":" + std::to_string(line_no) + ": name takes one value");
        spec.name = tokens[1];
        return;
      }
      if (label == "targets_x") current = &spec.targets_x;
      else if (label == "targets_y") current = &spec.targets_y;
      else if (label == "attributes_a") current = &spec.attributes_a;
      else if (label == "attributes_b") current = &spec.attributes_b;
      else raise(errc::format, path + ":" + std::to_string(line_no) + ": unknown section '" + label + "'");
      start = 1;
    } else if (current == nullptr) {
      raise(errc::format, path + ":" + std::to_string(line_no) + ": words before any section label");
    }
    for (std::size_t i = start; i < tokens.size(); ++i) current->push_back(to_lower(tokens[i]));
  });
  if (spec.name.empty()) {
    // default to the file stem
    auto slash = path.find_last_of("/\\");
    std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
    const auto dot = stem.find_last_of('.');
    if (dot != std::string::npos) stem = stem.substr(0, dot);
    spec.name = stem;
  }
  validate_weat_spec(spec);
  return spec;
}

namespace detail {

/// Per-word association s(w) = mean_a cos(w,a) - mean_b cos(w,b) for the
/// pooled target list, plus the word's resolved vectors.
struct WeatAssociations {
  std::vector<double> pooled;  // s over targets_x then targets_y
  std::size_t per_side;        // |X| = |Y|
  double observed;             // S(X, Y)
};

inline WeatAssociations weat_associations(const EmbeddingSpace& space, const WeatSpec& spec) {
  require(spec.targets_x.size() == spec.targets_y.size(), errc::invalid,
          "weat: target sets must have equal size");
  require(!spec.targets_x.empty(), errc::invalid, "weat: empty target sets");
  require(!spec.attributes_a.empty() && !spec.attributes_b.empty(), errc::invalid,
          "weat: empty attribute sets");

  const auto fetch = [&space, &spec](const std::string& word) {
    if (!space.vocab.contains(word))
      raise(errc::missing_word, "weat spec '" + spec.name + "': word not in vocabulary: " + word);
    return space.vector(word);
  };

  std::vector<Vector> va, vb;
  va.reserve(spec.attributes_a.size());
  vb.reserve(spec.attributes_b.size());
  for (const auto& w : spec.attributes_a) va.push_back(fetch(w));
  for (const auto& w : spec.attributes_b) vb.push_back(fetch(w));

  const auto association = [&va, &vb](const Vector& v) {
    double mean_a = 0.0, mean_b = 0.0;
    for (const auto& a : va) mean_a += cosine(v, a);
    for (const auto& b : vb) mean_b += cosine(v, b);
    return mean_a / static_cast<double>(va.size()) - mean_b / static_cast<double>(vb.size());
  };

  WeatAssociations result;
  result.per_side = spec.targets_x.size();
  result.pooled.reserve(2 * result.per_side);
  for (const auto& w : spec.targets_x) result.pooled.push_back(association(fetch(w)));
  for (const auto& w : spec.targets_y) result.pooled.push_back(association(fetch(w)));

  double sum_x = 0.0, sum_y = 0.0;
  for (std::size_t i = 0; i < result.per_side; ++i) sum_x += result.pooled[i];
  for (std::size_t i = result.per_side; i < result.pooled.size(); ++i) sum_y += result.pooled[i];
  result.observed = sum_x - sum_y;
  return result;
}

/// C(n, k) capped at `cap` (returns cap + 1 on overflow past the cap).
inline std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result fits comfortably while <= cap; the division is exact
    result = result * (n - k + i) / i;
    if (result > cap) return cap + 1;
  }
  return result;
}

}  // namespace detail

/// Differential association S = sum_x s(x) - sum_y s(y) with
/// s(w) = mean_a cos(w, a) - mean_b cos(w, b).
inline double weat_statistic(const EmbeddingSpace& space, const WeatSpec& spec) {
  return detail::weat_associations(space, spec).observed;
}

/// Effect size d = (mean_x s - mean_y s) / sd_{x in X U Y} s (n-1 denominator).
inline double weat_effect_size(const EmbeddingSpace& space, const WeatSpec& spec) {
  const auto assoc = detail::weat_associations(space, spec);
  const std::size_t n = assoc.per_side;
  double mean_x = 0.0, mean_y = 0.0, mean_all = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean_x += assoc.pooled[i];
  for (std::size_t i = n; i < 2 * n; ++i) mean_y += assoc.pooled[i];
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  for (const double s : assoc.pooled) mean_all += s;
  mean_all /= static_cast<double>(assoc.pooled.size());

  double ss = 0.0;
  for (const double s : assoc.pooled) ss += (s - mean_all) * (s - mean_all);
  const double variance = ss / static_cast<double>(assoc.pooled.size() - 1);
  require(variance > 0.0, errc::numeric,
          "weat_effect_size: zero variance of associations in spec '" + spec.name + "'");
  return (mean_x - mean_y) / std::sqrt(variance);
}

struct WeatPValue {
  double p = 1.0;
  bool exhaustive = true;
  std::uint64_t partitions = 0;  // partitions enumerated or sampled

  const char* method() const { return exhaustive ? "exhaustive" : "sampled"; }
};

/// One-sided permutation p-value: the fraction of equal-size partitions
/// (X', Y') of X U Y whose statistic strictly exceeds the observed one.
/// Exhaustive when C(2n, n) <= 200000, otherwise seeded sampling with the
/// observed partition included in the count.
inline WeatPValue weat_pvalue(const EmbeddingSpace& space, const WeatSpec& spec,
                              std::uint64_t permutations = 100000, std::uint64_t seed = 0) {
  require(permutations > 0, errc::invalid, "weat_pvalue: permutations must be positive");
  const auto assoc = detail::weat_associations(space, spec);
  const std::size_t n = assoc.per_side;
  const std::size_t pool = 2 * n;

  double total_sum = 0.0;
  for (const double s : assoc.pooled) total_sum += s;
  // S(X') = 2 * sum_{w in X'} s(w) - total, so only subset sums matter
  const auto partition_statistic = [&total_sum](double subset_sum) {
    return 2.0 * subset_sum - total_sum;
  };

  constexpr std::uint64_t kExhaustiveCap = 200000;
  const std::uint64_t count_exact =
      detail::binomial_capped(pool, n, kExhaustiveCap);

  WeatPValue result;
  if (count_exact <= kExhaustiveCap) {
    // lexicographic walk over all size-n index subsets of the pool
    std::vector<std::size_t> combo(n);
    for (std::size_t i = 0; i < n; ++i) combo[i] = i;
    std::uint64_t exceed = 0, visited = 0;
    for (;;) {
      double subset_sum = 0.0;
      for (const std::size_t i : combo) subset_sum += assoc.pooled[i];
      if (partition_statistic(subset_sum) > assoc.observed) ++exceed;
      ++visited;

      // advance
      std::size_t pos = n;
      while (pos > 0 && combo[pos - 1] == pool - n + pos - 1) --pos;
      if (pos == 0) break;
      ++combo[pos - 1];
      for (std::size_t i = pos; i < n; ++i) combo[i] = combo[i - 1] + 1;
    }
    result.p = static_cast<double>(exceed) / static_cast<double>(visited);
    result.exhaustive = true;
    result.partitions = visited;
  } else {
    Rng rng(seed);
    std::vector<std::size_t> indices(pool);
    for (std::size_t i = 0; i < pool; ++i) indices[i] = i;
    std::uint64_t exceed = 0;
    for (std::uint64_t trial = 0; trial < permutations; ++trial) {
      rng.shuffle(indices);
      double subset_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) subset_sum += assoc.pooled[indices[i]];
      if (partition_statistic(subset_sum) > assoc.observed) ++exceed;
    }
    // add-one correction: the observed partition itself is counted
    result.p = static_cast<double>(exceed + 1) / static_cast<double>(permutations + 1);
    result.exhaustive = false;
    result.partitions = permutations;
  }
  return result;
}

}  // namespace wordbias
