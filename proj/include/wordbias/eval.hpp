#pragma once

#include "wordbias/debias.hpp"
#include "wordbias/embedding.hpp"
#include "wordbias/kmeans.hpp"
#include "wordbias/numeric.hpp"
#include "wordbias/svm.hpp"
#include "wordbias/weat.hpp"
#include "wordbias/wordlists.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace wordbias {

// ---------------------------------------------------------------------------
// word similarity benchmarks

struct SimilarityDataset {
  struct Pair {
    std::string word1;
    std::string word2;
    double human_score;
  };
  std::string name;
  std::vector<Pair> pairs;
};

/// Tab-separated `word1 <TAB> word2 <TAB> score` lines, case-folded to
/// lowercase, '#' comments allowed.
inline SimilarityDataset load_similarity_tsv(const std::string& path) {
  SimilarityDataset dataset;
  detail::for_each_data_line(path, [&](std::string_view line, std::size_t line_no) {
    const auto tokens = detail::split_tokens(line);
    if (tokens.size() != 3)
      raise(errc::format,
            path + ":" + std::to_string(line_no) + ": expected word1<TAB>word2<TAB>score");
    const double score =
        detail::parse_double(tokens[2], path + ":" + std::to_string(line_no));
    dataset.pairs.push_back({to_lower(tokens[0]), to_lower(tokens[1]), score});
  });
  require(dataset.pairs.size() >= 2, errc::resource,
          path + ": similarity dataset needs at least 2 pairs");
  auto slash = path.find_last_of("/\\");
  std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
  const auto dot = stem.find_last_of('.');
  if (dot != std::string::npos) stem = stem.substr(0, dot);
  dataset.name = stem;
  return dataset;
}

struct SimilarityResult {
  std::string name;
  double spearman = 0.0;
  double pearson = 0.0;
  std::size_t covered_pairs = 0;
  std::size_t total_pairs = 0;
};

/// Spearman (and Pearson) correlation between human ratings and embedding
/// cosines over the pairs fully covered by the vocabulary.
inline SimilarityResult word_similarity_eval(const EmbeddingSpace& space,
                                             const SimilarityDataset& dataset) {
  std::vector<double> human, cosines;
  for (const auto& pair : dataset.pairs) {
    const auto i1 = space.vocab.find(pair.word1);
    const auto i2 = space.vocab.find(pair.word2);
    if (!i1 || !i2) continue;
    human.push_back(pair.human_score);
    cosines.push_back(cosine(space.matrix.row(static_cast<Index>(*i1)).transpose(),
                             space.matrix.row(static_cast<Index>(*i2)).transpose()));
  }
  require(human.size() >= 2, errc::resource,
          "word_similarity_eval: dataset '" + dataset.name + "' covers fewer than 2 pairs");

  SimilarityResult result;
  result.name = dataset.name;
  result.spearman = spearman(human, cosines);
  result.pearson = pearson(human, cosines);
  result.covered_pairs = human.size();
  result.total_pairs = dataset.pairs.size();
  return result;
}

// ---------------------------------------------------------------------------
// gender leakage metrics

namespace detail {

/// Neighbor labels for the clustering probe: n_per_side nearest neighbors of
/// each seed word in the original space, seeds excluded, overlaps dropped
/// from both sides.
inline std::pair<std::vector<std::size_t>, std::vector<int>> gendered_neighbor_labels(
    const EmbeddingSpace& original, const std::string& a, const std::string& b,
    std::size_t n_per_side) {
  const std::unordered_set<std::string> seeds = {a, b};
  const auto side_a = nearest_neighbors(original, original.vector(a), n_per_side, seeds);
  const auto side_b = nearest_neighbors(original, original.vector(b), n_per_side, seeds);

  std::unordered_set<std::size_t> in_a, in_b;
  for (const auto& e : side_a) in_a.insert(e.index);
  for (const auto& e : side_b) in_b.insert(e.index);

  std::vector<std::size_t> indices;
  std::vector<int> labels;
  for (const auto& e : side_a) {
    if (in_b.count(e.index)) continue;
    indices.push_back(e.index);
    labels.push_back(0);
  }
  for (const auto& e : side_b) {
    if (in_a.count(e.index)) continue;
    indices.push_back(e.index);
    labels.push_back(1);
  }
  return {std::move(indices), std::move(labels)};
}

}  // namespace detail

/// Fraction of formerly gendered neighbor words whose k=2 cluster in the
/// debiased space aligns with their original gender side, maximized over the
/// two label-to-cluster assignments (hence always >= 0.5).
inline double kmeans_gender_accuracy(const EmbeddingSpace& debiased,
                                     const EmbeddingSpace& original, const std::string& a,
                                     const std::string& b, std::size_t n_per_side = 500,
                                     int restarts = 10, std::uint64_t seed = 0) {
  require(debiased.vocab == original.vocab, errc::invalid,
          "kmeans_gender_accuracy: vocabularies differ");
  const auto [indices, labels] = detail::gendered_neighbor_labels(original, a, b, n_per_side);
  require(indices.size() >= 2, errc::invalid,
          "kmeans_gender_accuracy: not enough labeled neighbors");

  Matrix points(static_cast<Index>(indices.size()), debiased.dim());
  for (std::size_t i = 0; i < indices.size(); ++i)
    points.row(static_cast<Index>(i)) = debiased.matrix.row(static_cast<Index>(indices[i]));

  const KmeansResult clustering = kmeans(points, 2, restarts, seed);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (clustering.assignments[i] == labels[i]) ++agree;
  const double fraction = static_cast<double>(agree) / static_cast<double>(labels.size());
  return std::max(fraction, 1.0 - fraction);
}

/// Held-out accuracy of an RBF SVM predicting original-space gender labels
/// from debiased vectors: the n_total most biased words (half per side) are
/// labeled in the original space, a stratified seeded sample of n_train
/// trains the probe, and the rest are scored.
inline double svm_gender_accuracy(const EmbeddingSpace& debiased, const EmbeddingSpace& original,
                                  const std::string& a, const std::string& b,
                                  std::size_t n_total = 5000, std::size_t n_train = 1000,
                                  std::uint64_t seed = 0, double c = 1.0, double tol = 1e-3,
                                  double gamma = 0.0) {
  require(debiased.vocab == original.vocab, errc::invalid,
          "svm_gender_accuracy: vocabularies differ");
  require(n_total >= 4 && n_train >= 2 && n_train < n_total, errc::invalid,
          "svm_gender_accuracy: need n_train < n_total with both at least one pair");
  require(n_total % 2 == 0 && n_train % 2 == 0, errc::invalid,
          "svm_gender_accuracy: per-side counts must be integral");

  const BiasDirection dir = bias_direction(original, a, b);
  const BiasedWordSet biased = top_k_biased(original, dir, n_total / 2);

  const auto split_side = [&](const std::vector<BiasedWordEntry>& side, std::uint64_t stream) {
    std::vector<std::size_t> indices;
    indices.reserve(side.size());
    for (const auto& e : side) indices.push_back(e.index);
    Rng rng(derive_seed(seed, stream));
    rng.shuffle(indices);
    return indices;
  };
  const auto side_a = split_side(biased.side_a, 1);
  const auto side_b = split_side(biased.side_b, 2);

  const std::size_t train_per_side = n_train / 2;
  std::vector<std::size_t> train_idx, test_idx;
  std::vector<int> train_y, test_y;
  for (std::size_t i = 0; i < side_a.size(); ++i) {
    (i < train_per_side ? train_idx : test_idx).push_back(side_a[i]);
    (i < train_per_side ? train_y : test_y).push_back(1);
  }
  for (std::size_t i = 0; i < side_b.size(); ++i) {
    (i < train_per_side ? train_idx : test_idx).push_back(side_b[i]);
    (i < train_per_side ? train_y : test_y).push_back(-1);
  }

  const auto gather = [&debiased](const std::vector<std::size_t>& rows) {
    Matrix out(static_cast<Index>(rows.size()), debiased.dim());
    for (std::size_t i = 0; i < rows.size(); ++i)
      out.row(static_cast<Index>(i)) = debiased.matrix.row(static_cast<Index>(rows[i]));
    return out;
  };
  const Matrix train_x = gather(train_idx);
  const Matrix test_x = gather(test_idx);

  const double g = gamma > 0.0 ? gamma : rbf_gamma_scale(train_x);
  const SvmModel model = svm_rbf_train(train_x, train_y, c, g, tol);

  std::size_t correct = 0;
  for (Index i = 0; i < test_x.rows(); ++i)
    if (svm_predict(model, test_x.row(i).transpose()) == test_y[static_cast<std::size_t>(i)])
      ++correct;
  return static_cast<double>(correct) / static_cast<double>(test_y.size());
}

enum class CorrelationKind { pearson, spearman };

/// Correlation between each profession's original directional bias and the
/// male-labeled fraction of its neighborhood in the debiased space. Labels
/// come from the top-biased word sets of the original space.
inline double profession_bias_correlation(const EmbeddingSpace& debiased,
                                          const EmbeddingSpace& original,
                                          const std::vector<std::string>& professions,
                                          std::size_t k_nn = 100, const std::string& a = "he",
                                          const std::string& b = "she", std::size_t bias_k = 1000,
                                          CorrelationKind kind = CorrelationKind::pearson,
                                          std::size_t* skipped = nullptr) {
  require(debiased.vocab == original.vocab, errc::invalid,
          "profession_bias_correlation: vocabularies differ");
  const BiasDirection dir = bias_direction(original, a, b);
  const BiasedWordSet biased = top_k_biased(original, dir, bias_k);
  std::unordered_set<std::size_t> male_indices;
  for (const auto& e : biased.side_a) male_indices.insert(e.index);

  std::vector<double> original_bias, male_fraction;
  std::size_t missing = 0;
  for (const auto& profession : professions) {
    const auto idx = original.vocab.find(profession);
    if (!idx) {
      ++missing;
      continue;
    }
    const Vector vocab_vector = debiased.matrix.row(static_cast<Index>(*idx)).transpose();
    const auto neighbors = nearest_neighbors(debiased, vocab_vector, k_nn, {profession});
    std::size_t male = 0;
    for (const auto& n : neighbors)
      if (male_indices.count(n.index)) ++male;
    original_bias.push_back(original.matrix.row(static_cast<Index>(*idx)).dot(dir.direction));
    male_fraction.push_back(static_cast<double>(male) / static_cast<double>(k_nn));
  }
  if (skipped != nullptr) *skipped = missing;
  require(original_bias.size() >= 3, errc::resource,
          "profession_bias_correlation: fewer than 3 usable professions");
  return kind == CorrelationKind::pearson ? pearson(original_bias, male_fraction)
                                          : spearman(original_bias, male_fraction);
}

// ---------------------------------------------------------------------------
// full report

/// Word lists and datasets needed by the full evaluation suite.
struct Resources {
  std::vector<std::pair<std::string, std::string>> definitional_pairs;
  std::vector<std::pair<std::string, std::string>> equalize_pairs;
  std::unordered_set<std::string> gender_specific;
  std::vector<std::string> professions;
  std::vector<WeatSpec> weat_specs;
  std::vector<SimilarityDataset> similarity_datasets;
};

/// Conventional resource directory layout:
///   definitional_pairs.txt, equalize_pairs.txt, gender_specific.txt,
///   professions.txt, weat/*.txt, similarity/*.tsv
inline Resources load_resources(const std::string& directory) {
  namespace fs = std::filesystem;
  const fs::path root(directory);
  require(fs::is_directory(root), errc::resource,
          "resource directory not found: " + directory);

  const auto required_file = [&root](const char* name) {
    const fs::path p = root / name;
    if (!fs::is_regular_file(p))
      raise(errc::resource, "missing resource file: " + p.string());
    return p.string();
  };

  Resources resources;
  resources.definitional_pairs = load_word_pairs(required_file("definitional_pairs.txt"));
  resources.equalize_pairs = load_word_pairs(required_file("equalize_pairs.txt"));
  resources.gender_specific = load_word_set(required_file("gender_specific.txt"));
  resources.professions = load_word_list(required_file("professions.txt"));

  const auto sorted_files = [](const fs::path& dir, const char* extension) {
    std::vector<std::string> files;
    if (fs::is_directory(dir))
      for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == extension)
          files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    return files;
  };
  for (const auto& file : sorted_files(root / "weat", ".txt"))
    resources.weat_specs.push_back(load_weat_spec(file));
  for (const auto& file : sorted_files(root / "similarity", ".tsv"))
    resources.similarity_datasets.push_back(load_similarity_tsv(file));
  return resources;
}

struct WeatReportEntry {
  std::string name;
  double statistic = 0.0;
  double effect_size = 0.0;
  double p_value = 1.0;
  std::string method;
};

struct ReportParams {
  std::string word_a = "he";
  std::string word_b = "she";
  std::size_t n_per_side = 500;    // kmeans probe neighbors per seed
  std::size_t n_total = 5000;      // svm probe labeled words
  std::size_t n_train = 1000;      // svm probe training sample
  std::size_t bias_k = 1000;       // top-biased set size per side
  std::size_t profession_neighbors = 100;
  int kmeans_restarts = 10;
  double svm_c = 1.0;
  double svm_tol = 1e-3;
  std::uint64_t weat_permutations = 100000;
};

/// All six bias metrics plus the similarity benchmarks for one embedding.
struct EvaluationReport {
  std::string label;
  double kmeans_accuracy = 0.0;
  double svm_accuracy = 0.0;
  double profession_correlation = 0.0;
  std::vector<WeatReportEntry> weat_results;
  std::vector<SimilarityResult> similarity_results;
  std::uint64_t seed = 0;
};

inline EvaluationReport run_full_report(const EmbeddingSpace& debiased,
                                        const EmbeddingSpace& original,
                                        const Resources& resources, std::uint64_t seed,
                                        const ReportParams& params = {},
                                        const std::string& label = "embedding") {
  require(debiased.vocab == original.vocab, errc::invalid,
          "run_full_report: vocabularies differ");
  require(!resources.professions.empty(), errc::resource,
          "run_full_report: professions list is empty");
  require(!resources.weat_specs.empty(), errc::resource,
          "run_full_report: no WEAT specs loaded");
  require(!resources.similarity_datasets.empty(), errc::resource,
          "run_full_report: no similarity datasets loaded");

  const auto in_context = [](const std::string& metric, auto&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      throw Error(e.code(), metric + ": " + e.what());
    }
  };

  EvaluationReport report;
  report.label = label;
  report.seed = seed;
  report.kmeans_accuracy = in_context("kmeans_accuracy", [&] {
    return kmeans_gender_accuracy(debiased, original, params.word_a, params.word_b,
                                  params.n_per_side, params.kmeans_restarts,
                                  derive_seed(seed, 1));
  });
  report.svm_accuracy = in_context("svm_accuracy", [&] {
    return svm_gender_accuracy(debiased, original, params.word_a, params.word_b, params.n_total,
                               params.n_train, derive_seed(seed, 2), params.svm_c,
                               params.svm_tol);
  });
  report.profession_correlation = in_context("profession_correlation", [&] {
    return profession_bias_correlation(debiased, original, resources.professions,
                                       params.profession_neighbors, params.word_a, params.word_b,
                                       params.bias_k);
  });
  for (std::size_t i = 0; i < resources.weat_specs.size(); ++i) {
    const auto& spec = resources.weat_specs[i];
    report.weat_results.push_back(in_context("weat:" + spec.name, [&] {
      WeatReportEntry entry;
      entry.name = spec.name;
      entry.statistic = weat_statistic(debiased, spec);
      entry.effect_size = weat_effect_size(debiased, spec);
      const WeatPValue pv =
          weat_pvalue(debiased, spec, params.weat_permutations, derive_seed(seed, 100 + i));
      entry.p_value = pv.p;
      entry.method = pv.method();
      return entry;
    }));
  }
  for (const auto& dataset : resources.similarity_datasets) {
    report.similarity_results.push_back(in_context("similarity:" + dataset.name, [&] {
      return word_similarity_eval(debiased, dataset);
    }));
  }
  return report;
}

// ---------------------------------------------------------------------------
// report serialization

inline nlohmann::json report_to_json(const EvaluationReport& report) {
  nlohmann::json weat = nlohmann::json::object();
  for (const auto& entry : report.weat_results) {
    weat[entry.name] = {{"statistic", entry.statistic},
                        {"effect_size", entry.effect_size},
                        {"p_value", entry.p_value},
                        {"method", entry.method}};
  }
  nlohmann::json similarity = nlohmann::json::object();
  for (const auto& entry : report.similarity_results) {
    similarity[entry.name] = {{"spearman", entry.spearman},
                              {"pearson", entry.pearson},
                              {"covered_pairs", entry.covered_pairs},
                              {"total_pairs", entry.total_pairs}};
  }
  return {{"label", report.label},
          {"kmeans_accuracy", report.kmeans_accuracy},
          {"svm_accuracy", report.svm_accuracy},
          {"profession_correlation", report.profession_correlation},
          {"weat_results", weat},
          {"similarity_results", similarity},
          {"seed", report.seed}};
}

inline EvaluationReport report_from_json(const nlohmann::json& j) {
  EvaluationReport report;
  report.label = j.at("label").get<std::string>();
  report.kmeans_accuracy = j.at("kmeans_accuracy").get<double>();
  report.svm_accuracy = j.at("svm_accuracy").get<double>();
  report.profession_correlation = j.at("profession_correlation").get<double>();
  report.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& [name, entry] : j.at("weat_results").items()) {
    WeatReportEntry e;
    e.name = name;
    e.statistic = entry.at("statistic").get<double>();
    e.effect_size = entry.at("effect_size").get<double>();
    e.p_value = entry.at("p_value").get<double>();
    e.method = entry.at("method").get<std::string>();
    report.weat_results.push_back(std::move(e));
  }
  for (const auto& [name, entry] : j.at("similarity_results").items()) {
    SimilarityResult r;
    r.name = name;
    r.spearman = entry.at("spearman").get<double>();
    r.pearson = entry.at("pearson").get<double>();
    r.covered_pairs = entry.at("covered_pairs").get<std::size_t>();
    r.total_pairs = entry.at("total_pairs").get<std::size_t>();
    report.similarity_results.push_back(std::move(r));
  }
  return report;
}

/// Flat CSV row (with a matching header) for cross-embedding tables.
inline std::string report_csv_header(const EvaluationReport& report) {
  std::string header = "label,kmeans_accuracy,svm_accuracy,profession_correlation";
  for (const auto& entry : report.weat_results) {
    header += "," + entry.name + "_statistic";
    header += "," + entry.name + "_effect_size";
    header += "," + entry.name + "_p_value";
    header += "," + entry.name + "_method";
  }
  for (const auto& entry : report.similarity_results) {
    header += "," + entry.name + "_spearman";
    header += "," + entry.name + "_pearson";
    header += "," + entry.name + "_covered";
    header += "," + entry.name + "_total";
  }
  header += ",seed";
  return header;
}

inline std::string report_csv_row(const EvaluationReport& report) {
  std::string row = report.label;
  const auto add = [&row](double v) { row += "," + format_double(v, 10); };
  add(report.kmeans_accuracy);
  add(report.svm_accuracy);
  add(report.profession_correlation);
  for (const auto& entry : report.weat_results) {
    add(entry.statistic);
    add(entry.effect_size);
    add(entry.p_value);
    row += "," + entry.method;
  }
  for (const auto& entry : report.similarity_results) {
    add(entry.spearman);
    add(entry.pearson);
    row += "," + std::to_string(entry.covered_pairs);
    row += "," + std::to_string(entry.total_pairs);
  }
  row += "," + std::to_string(report.seed);
  return row;
}

}  // namespace wordbias
