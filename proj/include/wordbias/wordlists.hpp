#pragma once

#include "wordbias/core.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace wordbias {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

namespace detail {

inline std::vector<std::string> split_tokens(std::string_view line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) tokens.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

/// Yields the non-empty, non-comment lines of a text resource file.
template <typename Callback>
void for_each_data_line(const std::string& path, Callback&& callback) {
  std::ifstream in(path);
  if (!in) raise(errc::resource, "cannot open resource file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    const auto start = view.find_first_not_of(" \t");
    if (start == std::string_view::npos) continue;
    view.remove_prefix(start);
    if (view.front() == '#') continue;
    callback(view, line_no);
  }
}

}  // namespace detail

/// One word per line, '#' comments; words are case-folded to lowercase.
inline std::vector<std::string> load_word_list(const std::string& path) {
  std::vector<std::string> words;
  detail::for_each_data_line(path, [&](std::string_view line, std::size_t line_no) {
    const auto tokens = detail::split_tokens(line);
    if (tokens.size() != 1)
      raise(errc::format, path + ":" + std::to_string(line_no) + ": expected one word per line");
    words.push_back(to_lower(tokens[0]));
  });
  return words;
}

inline std::unordered_set<std::string> load_word_set(const std::string& path) {
  const auto words = load_word_list(path);
  return {words.begin(), words.end()};
}

/// Two whitespace-separated words per line, '#' comments, lowercase.
inline std::vector<std::pair<std::string, std::string>> load_word_pairs(const std::string& path) {
  std::vector<std::pair<std::string, std::string>> pairs;
  detail::for_each_data_line(path, [&](std::string_view line, std::size_t line_no) {
    const auto tokens = detail::split_tokens(line);
    if (tokens.size() != 2)
      raise(errc::format, path + ":" + std::to_string(line_no) + ": expected two words per line");
    pairs.emplace_back(to_lower(tokens[0]), to_lower(tokens[1]));
  });
  return pairs;
}

}  // namespace wordbias
