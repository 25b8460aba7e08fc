// wordbias: debias word embeddings and measure residual gender bias.
//
// Subcommands:
//   wordbias debias         apply a debiasing method to a GloVe-format file
//   wordbias mdr fit        fit the manifold re-embedding model
//   wordbias mdr transform  re-embed a space through a fitted model
//   wordbias eval           run the full bias + similarity report
//   wordbias report merge   merge per-embedding CSV reports into one table

#include "wordbias/debias.hpp"
#include "wordbias/embedding.hpp"
#include "wordbias/eval.hpp"
#include "wordbias/manifold.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace wordbias;

constexpr const char* kResourceEnvVar = "WORDBIAS_DATA";

struct PipelineOptions {
  std::string input;
  std::string output;
  std::string method = "none";
  std::string model_path;
  std::string resources;
  std::string report_json;
  std::string report_csv;
  std::string label;
  std::string word_a = "he";
  std::string word_b = "she";
  std::size_t cluster_k = 1000;
  MdrConfig mdr;
  std::uint64_t seed = 0;
  bool raw = false;
  bool neighbor_ranking = false;
};

std::string default_resources(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv(kResourceEnvVar); env != nullptr && *env != '\0') return env;
  raise(errc::resource,
        std::string("no resource directory: pass --resources or set ") + kResourceEnvVar);
}

std::uint64_t file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io, "cannot open file for checksum: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const auto got = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) raise(errc::io, "cannot open output file: " + path);
  out << contents;
  if (!out) raise(errc::io, "write failed: " + path);
}

nlohmann::json mdr_config_json(const MdrConfig& config) {
  return {{"window_start", config.window_start},
          {"window_length", config.window_length},
          {"lle_neighbors", config.lle_neighbors},
          {"out_dim", config.out_dim},
          {"reg_scale", config.reg_scale}};
}

void write_sidecar(const PipelineOptions& options, const std::string& command,
                   const BiasDirection* removed = nullptr) {
  nlohmann::json meta = {
      {"tool", "wordbias"},
      {"command", command},
      {"method", options.method},
      {"input", options.input},
      {"input_checksum", "fnv1a64:" + hex64(file_checksum(options.input))},
      {"seed", options.seed},
      {"parameters",
       {{"word_a", options.word_a},
        {"word_b", options.word_b},
        {"cluster_k", options.cluster_k},
        {"raw", options.raw},
        {"neighbor_ranking", options.neighbor_ranking},
        {"mdr", mdr_config_json(options.mdr)}}},
  };
  if (removed != nullptr) {
    std::vector<double> direction(removed->direction.data(),
                                  removed->direction.data() + removed->direction.size());
    meta["removed_direction"] = direction;
  }
  write_text_file(options.output + ".meta.json", meta.dump(2) + "\n");
}

/// Derives and removes the cluster PCA direction; returns the direction used.
BiasDirection apply_cluster_debias(EmbeddingSpace& space, const PipelineOptions& options) {
  const BiasDirection seed_dir = bias_direction(space, options.word_a, options.word_b);
  const BiasedWordSet biased =
      top_k_biased(space, seed_dir, options.cluster_k,
                   options.neighbor_ranking ? BiasRanking::seed_neighbors
                                            : BiasRanking::projection);
  const BiasDirection pc = cluster_debias_direction(space, biased);
  space = remove_direction(space, pc);
  return pc;
}

EmbeddingSpace apply_hard_debias(const EmbeddingSpace& space, const Resources& resources) {
  HardDebiasStats stats;
  EmbeddingSpace result = hard_debias(space, resources.definitional_pairs,
                                      resources.equalize_pairs, resources.gender_specific, &stats);
  if (stats.skipped_definitional_pairs > 0 || stats.skipped_equalize_pairs > 0) {
    std::cerr << "warning: skipped " << stats.skipped_definitional_pairs
              << " definitional and " << stats.skipped_equalize_pairs
              << " equalize pairs with out-of-vocabulary words\n";
  }
  return result;
}

int cmd_debias(const PipelineOptions& options) {
  EmbeddingSpace space = load_glove_text(options.input);
  if (!options.raw) space = normalize_rows(space);

  const bool with_mdr = options.method.rfind("mdr", 0) == 0;
  const bool with_cluster = options.method == "cluster" || options.method == "mdr-cluster";
  const bool with_hard = options.method == "hard" || options.method == "mdr-hard";

  if (with_mdr) {
    const ManifoldModel model = fit_mdr(space, options.mdr);
    space = transform_space(model, space);
    if (with_cluster || with_hard) space = normalize_rows(space);
  }

  std::optional<BiasDirection> removed;
  if (with_cluster) {
    removed = apply_cluster_debias(space, options);
  } else if (with_hard) {
    const Resources resources = load_resources(default_resources(options.resources));
    space = apply_hard_debias(space, resources);
  }

  save_glove_text(space, options.output);
  write_sidecar(options, "debias", removed ? &*removed : nullptr);
  return 0;
}

int cmd_mdr_fit(const PipelineOptions& options) {
  EmbeddingSpace space = load_glove_text(options.input);
  if (!options.raw) space = normalize_rows(space);
  const ManifoldModel model = fit_mdr(space, options.mdr);
  save_manifold_model(model, options.output);
  return 0;
}

int cmd_mdr_transform(const PipelineOptions& options) {
  const ManifoldModel model = load_manifold_model(options.model_path);
  EmbeddingSpace space = load_glove_text(options.input);
  if (!options.raw) space = normalize_rows(space);
  save_glove_text(transform_space(model, space), options.output);
  return 0;
}

std::string table_row(const std::vector<std::string>& cells, const std::vector<std::size_t>& widths) {
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::string cell = cells[i];
    if (cell.size() < widths[i]) cell.append(widths[i] - cell.size(), ' ');
    row += cell;
    if (i + 1 < cells.size()) row += "  ";
  }
  return row;
}

void print_report_table(const std::vector<EvaluationReport>& reports) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"embedding", "kmeans_acc", "corr_prof", "svm_acc"};
  if (!reports.empty()) {
    for (const auto& entry : reports.front().weat_results) header.push_back(entry.name + "_pval");
    for (const auto& entry : reports.front().similarity_results)
      header.push_back(entry.name + "_rho");
  }
  rows.push_back(header);
  for (const auto& report : reports) {
    std::vector<std::string> row = {report.label, format_double(report.kmeans_accuracy, 4),
                                    format_double(report.profession_correlation, 4),
                                    format_double(report.svm_accuracy, 4)};
    for (const auto& entry : report.weat_results) row.push_back(format_double(entry.p_value, 4));
    for (const auto& entry : report.similarity_results)
      row.push_back(format_double(entry.spearman, 4));
    rows.push_back(row);
  }
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  for (const auto& row : rows) std::cout << table_row(row, widths) << "\n";
}

int cmd_eval(const PipelineOptions& options, const std::string& debiased_path,
             const std::string& original_path) {
  const Resources resources = load_resources(default_resources(options.resources));
  EmbeddingSpace debiased = normalize_rows(load_glove_text(debiased_path));
  EmbeddingSpace original = normalize_rows(load_glove_text(original_path));
  require(debiased.vocab == original.vocab, errc::invalid,
          "eval: embeddings have different vocabularies");

  ReportParams params;
  params.word_a = options.word_a;
  params.word_b = options.word_b;
  params.bias_k = options.cluster_k;
  const std::string label =
      options.label.empty() ? std::filesystem::path(debiased_path).stem().string()
                            : options.label;
  const EvaluationReport report =
      run_full_report(debiased, original, resources, options.seed, params, label);

  if (!options.report_json.empty())
    write_text_file(options.report_json, report_to_json(report).dump(2) + "\n");
  if (!options.report_csv.empty())
    write_text_file(options.report_csv,
                    report_csv_header(report) + "\n" + report_csv_row(report) + "\n");
  print_report_table({report});
  return 0;
}

int cmd_report_merge(const std::vector<std::string>& inputs, const std::string& output) {
  require(!inputs.empty(), errc::invalid, "report merge: no input CSV files");
  std::string header;
  std::vector<std::string> rows;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) raise(errc::io, "cannot open report: " + path);
    std::string first, line;
    if (!std::getline(in, first)) raise(errc::format, path + ": empty report");
    if (header.empty())
      header = first;
    else if (header != first)
      raise(errc::format, path + ": header differs from the first report (different resources?)");
    while (std::getline(in, line))
      if (!line.empty()) rows.push_back(line);
  }

  std::string merged = header + "\n";
  for (const auto& row : rows) merged += row + "\n";
  if (!output.empty()) write_text_file(output, merged);

  // aligned comparison table on stdout
  const auto split_csv = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  std::vector<std::vector<std::string>> table = {split_csv(header)};
  for (const auto& row : rows) table.push_back(split_csv(row));
  std::vector<std::size_t> widths(table.front().size(), 0);
  for (const auto& row : table)
    for (std::size_t i = 0; i < row.size() && i < widths.size(); ++i)
      widths[i] = std::max(widths[i], row[i].size());
  for (const auto& row : table) std::cout << table_row(row, widths) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"debias word embeddings and measure residual gender bias"};
  app.require_subcommand(1);
  app.set_config("--config");

  PipelineOptions options;
  const auto add_common = [&options](CLI::App* cmd) {
    cmd->add_option("--seed", options.seed, "random seed recorded in outputs");
    cmd->add_option("--resources", options.resources,
                    std::string("resource directory (default: $") + kResourceEnvVar + ")");
    cmd->add_flag("--raw", options.raw, "skip row normalization of loaded embeddings");
    cmd->add_option("--word-a", options.word_a, "first seed word (default he)");
    cmd->add_option("--word-b", options.word_b, "second seed word (default she)");
  };
  const auto add_mdr_options = [&options](CLI::App* cmd) {
    cmd->add_option("--window-start", options.mdr.window_start, "sample window start rank");
    cmd->add_option("--window-length", options.mdr.window_length, "sample window length");
    cmd->add_option("--lle-neighbors", options.mdr.lle_neighbors, "LLE neighborhood size");
    cmd->add_option("--out-dim", options.mdr.out_dim, "output dimension (0 = keep input)");
    cmd->add_option("--reg-scale", options.mdr.reg_scale, "LLE regularization scale");
  };

  auto* debias_cmd = app.add_subcommand("debias", "apply a debiasing method");
  debias_cmd->add_option("--input", options.input, "input GloVe-format file")->required();
  debias_cmd->add_option("--output", options.output, "output GloVe-format file")->required();
  debias_cmd
      ->add_option("--method", options.method,
                   "none|cluster|hard|mdr|mdr-cluster|mdr-hard")
      ->check(CLI::IsMember({"none", "cluster", "hard", "mdr", "mdr-cluster", "mdr-hard"}));
  debias_cmd->add_option("--cluster-k", options.cluster_k, "biased words per side");
  debias_cmd->add_flag("--neighbor-ranking", options.neighbor_ranking,
                       "rank biased words by seed-word cosine instead of projection");
  add_mdr_options(debias_cmd);
  add_common(debias_cmd);

  auto* mdr_cmd = app.add_subcommand("mdr", "manifold re-embedding steps");
  mdr_cmd->require_subcommand(1);
  auto* fit_cmd = mdr_cmd->add_subcommand("fit", "fit a manifold model on the sample window");
  fit_cmd->add_option("--input", options.input, "input GloVe-format file")->required();
  fit_cmd->add_option("--output", options.output, "output model file")->required();
  add_mdr_options(fit_cmd);
  add_common(fit_cmd);
  auto* transform_cmd = mdr_cmd->add_subcommand("transform", "re-embed a space through a model");
  transform_cmd->add_option("--input", options.input, "input GloVe-format file")->required();
  transform_cmd->add_option("--model", options.model_path, "fitted model file")->required();
  transform_cmd->add_option("--output", options.output, "output GloVe-format file")->required();
  add_common(transform_cmd);

  std::string debiased_path, original_path;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate an embedding against its original");
  eval_cmd->add_option("--debiased", debiased_path, "debiased GloVe-format file")->required();
  eval_cmd->add_option("--original", original_path, "original GloVe-format file")->required();
  eval_cmd->add_option("--report-json", options.report_json, "write the JSON report here");
  eval_cmd->add_option("--report-csv", options.report_csv, "write the CSV report row here");
  eval_cmd->add_option("--label", options.label, "embedding label used in reports");
  eval_cmd->add_option("--cluster-k", options.cluster_k, "biased words per side");
  add_common(eval_cmd);

  std::vector<std::string> merge_inputs;
  std::string merge_output;
  auto* report_cmd = app.add_subcommand("report", "report utilities");
  report_cmd->require_subcommand(1);
  auto* merge_cmd = report_cmd->add_subcommand("merge", "merge CSV reports into one table");
  merge_cmd->add_option("inputs", merge_inputs, "CSV report files")->required();
  merge_cmd->add_option("--output", merge_output, "write the merged CSV here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(debias_cmd)) return cmd_debias(options);
    if (app.got_subcommand(mdr_cmd)) {
      if (mdr_cmd->got_subcommand(fit_cmd)) return cmd_mdr_fit(options);
      return cmd_mdr_transform(options);
    }
    if (app.got_subcommand(eval_cmd)) return cmd_eval(options, debiased_path, original_path);
    if (app.got_subcommand(report_cmd)) return cmd_report_merge(merge_inputs, merge_output);
  } catch (const wordbias::Error& e) {
    std::cerr << "error " << e.code_name() << ": " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error internal: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
