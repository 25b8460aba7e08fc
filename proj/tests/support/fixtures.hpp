// Shared test fixtures: temp directories, random spaces, synthetic manifolds,
// and a synthetic gendered embedding whose structure mirrors the phenomena
// the pipeline targets (a linear gender axis off the seed direction plus a
// nonlinear ring code that only a kernel method can read).
#pragma once

#include "wordbias/embedding.hpp"
#include "wordbias/eval.hpp"
#include "wordbias/wordlists.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace fixtures {

using wordbias::EmbeddingSpace;
using wordbias::Index;
using wordbias::Matrix;
using wordbias::Rng;
using wordbias::Vector;
using wordbias::Vocabulary;

inline std::string data_dir() { return WORDBIAS_DATA_DIR; }
inline std::string cli_path() { return WORDBIAS_CLI_PATH; }

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    const auto base = std::filesystem::temp_directory_path();
    path_ = base / ("wordbias-" + tag + "-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

inline EmbeddingSpace make_space(const std::vector<std::string>& words, const Matrix& matrix,
                                 bool normalized = false) {
  EmbeddingSpace space;
  space.vocab = Vocabulary::from_words(words);
  space.matrix = matrix;
  space.normalized = normalized;
  return space;
}

inline EmbeddingSpace random_space(std::size_t n, Index d, std::uint64_t seed) {
  std::vector<std::string> words;
  words.reserve(n);
  for (std::size_t i = 0; i < n; ++i) words.push_back("w" + std::to_string(i));
  Matrix m(static_cast<Index>(n), d);
  Rng rng(seed);
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = 2.0 * rng.next_double() - 1.0;
  return make_space(words, m);
}

/// Noiseless helix arc in 3 dimensions, parameterized by t in [0, 1].
inline EmbeddingSpace curve_space(std::size_t n) {
  std::vector<std::string> words;
  Matrix m(static_cast<Index>(n), 3);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    m(static_cast<Index>(i), 0) = std::cos(1.6 * M_PI * t);
    m(static_cast<Index>(i), 1) = std::sin(1.6 * M_PI * t);
    m(static_cast<Index>(i), 2) = 1.2 * t;
    words.push_back("p" + std::to_string(i));
  }
  return make_space(words, m);
}

/// Classic swiss roll: a 2-manifold rolled up in 3 dimensions.
inline EmbeddingSpace swiss_roll(std::size_t n, std::uint64_t seed) {
  std::vector<std::string> words;
  Matrix m(static_cast<Index>(n), 3);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 1.5 * M_PI * (1.0 + 2.0 * rng.next_double());
    const double h = 21.0 * rng.next_double();
    m(static_cast<Index>(i), 0) = t * std::cos(t);
    m(static_cast<Index>(i), 1) = h;
    m(static_cast<Index>(i), 2) = t * std::sin(t);
    words.push_back("p" + std::to_string(i));
  }
  return make_space(words, m);
}

// ---------------------------------------------------------------------------
// synthetic gendered embedding

struct GenderedSpaceConfig {
  std::size_t gendered_fillers = 5600;  // even; half per side
  std::size_t neutral_fillers = 2600;
  std::size_t head_words = 400;         // resource words spread over these ranks
  Index sem_dims = 20;
  double sem_scale = 0.85;
  double gender_scale = 1.5;   // linear strength along the stereotype axis
  double marker_scale = 2.2;   // extra strength for definitionally gendered words
  double ring_base = 0.65;
  double ring_delta = 0.22;
  double ring_sharpness = 6.0;
  double ring_turns = 1.9;     // angle sweep factor (times pi |s|)
  double theta_deg = 55.0;     // stereotype axis angle away from the seed axis
  double noise = 0.02;
  std::uint64_t seed = 20240901;
};

struct GenderedSpace {
  EmbeddingSpace space;                 // not normalized
  std::vector<std::size_t> neutral;     // vocabulary indices of neutral words
  std::vector<double> strength;         // signed gender strength per word (0 = neutral)
  GenderedSpaceConfig config;
};

namespace detail {

inline const std::vector<std::string>& male_markers() {
  static const std::vector<std::string> words = {
      "he", "him", "his", "himself", "man", "men", "male", "males", "boy", "boys", "guy",
      "guys", "dude", "dudes", "gentleman", "gentlemen", "lad", "lads", "sir", "mr", "mister",
      "father", "fathers", "dad", "dads", "daddy", "papa", "son", "sons", "brother",
      "brothers", "uncle", "uncles", "nephew", "nephews", "grandfather", "grandpa",
      "grandson", "grandsons", "husband", "husbands", "groom", "grooms", "widower", "king",
      "kings", "prince", "princes", "duke", "lord", "lords", "baron", "emperor", "monk",
      "monks", "monastery", "priest", "priests", "fraternity", "fraternities", "spokesman",
      "spokesmen", "chairman", "chairmen", "councilman", "councilmen", "congressman",
      "congressmen", "businessman", "businessmen", "salesman", "salesmen", "policeman",
      "policemen", "fireman", "firemen", "mailman", "schoolboy", "schoolboys", "boyhood",
      "boyfriend", "boyfriends", "fatherhood", "brotherhood", "manhood", "masculinity",
      "masculine", "paternal", "paternity", "testosterone", "colt", "stallion", "gelding",
      "bull", "rooster", "czar", "patriarch", "bachelor", "suitor", "beard", "bearded",
      "brethren", "butler", "gay", "gays", "semen", "sperm", "prostate", "viagra", "penis",
      "fella", "fellas", "john", "paul", "mike", "kevin", "steve", "greg", "jeff", "bill",
      "twin_brother", "ex_boyfriend", "god"};
  return words;
}

inline const std::vector<std::string>& female_markers() {
  static const std::vector<std::string> words = {
      "she", "her", "hers", "herself", "woman", "women", "female", "females", "girl",
      "girls", "gal", "gals", "lady", "ladies", "lass", "lasses", "madam", "mrs", "ms",
      "missus", "miss", "mother", "mothers", "mom", "moms", "mommy", "mama", "daughter",
      "daughters", "sister", "sisters", "aunt", "aunts", "niece", "nieces", "grandmother",
      "grandma", "granddaughter", "granddaughters", "wife", "wives", "bride", "brides",
      "widow", "queen", "queens", "princess", "princesses", "duchess", "baroness",
      "empress", "nun", "nuns", "convent", "sorority", "sororities", "spokeswoman",
      "spokeswomen", "chairwoman", "chairwomen", "councilwoman", "councilwomen",
      "congresswoman", "congresswomen", "businesswoman", "businesswomen", "saleswoman",
      "saleswomen", "policewoman", "policewomen", "firewoman", "schoolgirl", "schoolgirls",
      "girlhood", "girlfriend", "girlfriends", "motherhood", "sisterhood", "womanhood",
      "femininity", "feminine", "maternal", "maternity", "estrogen", "filly", "mare", "cow",
      "hen", "tsarina", "matriarch", "spinster", "goddess", "actress", "actresses",
      "waitress", "heroine", "hostess", "stewardess", "seamstress", "ballerina",
      "menopause", "pregnancy", "pregnant", "ovum", "uterus", "vagina", "ovarian", "mary",
      "amy", "joan", "lisa", "sarah", "diana", "kate", "ann", "donna", "lesbian",
      "lesbians", "twin_sister", "ex_girlfriend"};
  return words;
}

// mildly gendered WEAT material: positive strength leans male
inline const std::unordered_map<std::string, double>& mild_strengths() {
  static const std::unordered_map<std::string, double> values = [] {
    std::unordered_map<std::string, double> v;
    const auto add = [&v](std::initializer_list<const char*> words, double s) {
      for (const char* w : words) v[w] = s;
    };
    add({"executive", "management", "professional", "corporation", "salary", "office",
         "business", "career"},
        0.28);
    add({"home", "parents", "children", "family", "cousins", "marriage", "wedding",
         "relatives"},
        -0.28);
    add({"math", "algebra", "geometry", "calculus", "equations", "computation", "numbers",
         "addition"},
        0.22);
    add({"science", "technology", "physics", "chemistry", "einstein", "nasa", "experiment",
         "astronomy"},
        0.24);
    add({"poetry", "art", "dance", "literature", "novel", "symphony", "drama", "sculpture",
         "shakespeare"},
        -0.22);
    return v;
  }();
  return values;
}

}  // namespace detail

/// Builds the synthetic space. Word vectors have four structural axes plus a
/// random smooth semantic manifold:
///   e0 ("seed" axis u): carried mostly by definitionally gendered words
///   e1 (stereotype axis v): with u forms the cluster axis w* at theta_deg
///   e2/e3: ring code, radius = base + delta * tanh(sharpness * s) -- a side
///          signal a linear probe cannot read but an RBF kernel can
///   remaining dims: random Fourier features of a 2-d latent
/// All words named by the bundled resource files are included so the full
/// evaluation suite runs against this space.
inline GenderedSpace make_gendered_space(const GenderedSpaceConfig& config = {}) {
  const Index d = 4 + config.sem_dims;
  const double theta = config.theta_deg * M_PI / 180.0;
  Rng rng(config.seed);

  // fixed random Fourier basis for the semantic manifold
  std::vector<double> omega1(config.sem_dims), omega2(config.sem_dims), phase(config.sem_dims),
      amplitude(config.sem_dims);
  for (Index j = 0; j < config.sem_dims; ++j) {
    omega1[j] = M_PI * (1.0 + 4.0 * rng.next_double());
    omega2[j] = M_PI * (1.0 + 4.0 * rng.next_double());
    phase[j] = 2.0 * M_PI * rng.next_double();
    amplitude[j] = 1.6 / (1.0 + 0.3 * static_cast<double>(j));
  }

  // collect resource words with their roles
  std::unordered_map<std::string, double> strength_by_word;  // signed, 0 = neutral
  std::unordered_set<std::string> marker;
  for (const auto& w : detail::male_markers()) {
    strength_by_word[w] = 1.0;
    marker.insert(w);
  }
  for (const auto& w : detail::female_markers()) {
    strength_by_word[w] = -1.0;
    marker.insert(w);
  }
  for (const auto& [w, s] : detail::mild_strengths()) strength_by_word.emplace(w, s);

  // professions get graded, deterministic stereotype strengths
  const auto professions = wordbias::load_word_list(data_dir() + "/professions.txt");
  for (std::size_t i = 0; i < professions.size(); ++i) {
    const double frac = std::fmod(0.6180339887 * static_cast<double>(i + 1), 1.0);
    strength_by_word.emplace(professions[i], 1.1 * (frac - 0.5));
  }
  // keep every word from the remaining lists present (strength 0 if new)
  for (const auto& [a, b] : wordbias::load_word_pairs(data_dir() + "/definitional_pairs.txt")) {
    strength_by_word.emplace(a, -1.0);  // pairs are listed female-first
    strength_by_word.emplace(b, 1.0);
  }
  for (const auto& [a, b] : wordbias::load_word_pairs(data_dir() + "/equalize_pairs.txt")) {
    strength_by_word.emplace(a, 1.0);
    strength_by_word.emplace(b, -1.0);
  }
  for (const auto& w : wordbias::load_word_set(data_dir() + "/gender_specific.txt"))
    strength_by_word.emplace(w, 0.0);
  for (const auto& weat_file : {"career_family.txt", "math_arts.txt", "science_arts.txt"}) {
    const auto spec = wordbias::load_weat_spec(data_dir() + "/weat/" + weat_file);
    for (const auto* set : {&spec.targets_x, &spec.targets_y, &spec.attributes_a,
                            &spec.attributes_b})
      for (const auto& w : *set) strength_by_word.emplace(w, 0.0);
  }

  std::vector<std::string> resource_words;
  resource_words.reserve(strength_by_word.size());
  for (const auto& [w, s] : strength_by_word) resource_words.push_back(w);
  std::sort(resource_words.begin(), resource_words.end());
  Rng order_rng(wordbias::derive_seed(config.seed, 7));
  order_rng.shuffle(resource_words);

  // vocabulary layout: resource words over the head ranks, then interleaved
  // gendered / neutral fillers (roughly 2:1) through the rest
  std::vector<std::string> words;
  std::vector<double> strength;
  GenderedSpace result;
  const std::size_t total =
      resource_words.size() + config.gendered_fillers + config.neutral_fillers;
  words.reserve(total);
  strength.reserve(total);

  std::size_t gendered_left = config.gendered_fillers;
  std::size_t neutral_left = config.neutral_fillers;
  std::size_t resource_left = resource_words.size();
  std::size_t gi = 0, ni = 0;
  Rng strength_rng(wordbias::derive_seed(config.seed, 11));
  const std::size_t head_stride =
      std::max<std::size_t>(1, config.head_words / std::max<std::size_t>(1, resource_words.size()));

  while (gendered_left + neutral_left + resource_left > 0) {
    const std::size_t rank = words.size();
    if (resource_left > 0 && (rank % head_stride == 0 || gendered_left + neutral_left == 0)) {
      const auto& w = resource_words[resource_words.size() - resource_left];
      --resource_left;
      words.push_back(w);
      const double base = strength_by_word.at(w);
      if (marker.count(w)) {
        strength.push_back(base * (0.88 + 0.1 * strength_rng.next_double()));
      } else if (base != 0.0) {
        strength.push_back(base * (0.85 + 0.3 * strength_rng.next_double()));
      } else {
        strength.push_back(0.0);
      }
      continue;
    }
    const bool pick_gendered =
        gendered_left > 0 && (neutral_left == 0 || (rank % 3) != 2);
    if (pick_gendered) {
      const double side = (gi % 2 == 0) ? 1.0 : -1.0;
      const double magnitude = 0.3 + 0.7 * strength_rng.next_double();
      words.push_back("g" + std::to_string(gi++));
      strength.push_back(side * magnitude);
      --gendered_left;
    } else {
      words.push_back("n" + std::to_string(ni++));
      strength.push_back(0.0);
      --neutral_left;
    }
  }

  Matrix m(static_cast<Index>(words.size()), d);
  Rng vec_rng(wordbias::derive_seed(config.seed, 13));
  for (std::size_t i = 0; i < words.size(); ++i) {
    const Index row = static_cast<Index>(i);
    const double z1 = vec_rng.next_double();
    const double z2 = vec_rng.next_double();
    const double s = strength[i];
    const bool is_marker = marker.count(words[i]) != 0;

    m.row(row).setZero();
    const double axis = is_marker ? config.marker_scale : config.gender_scale;
    if (s != 0.0) {
      if (is_marker) {
        // definitional words sit almost purely on the seed axis u
        m(row, 0) += axis * s;
        m(row, 1) += 0.15 * config.gender_scale * s * std::sin(theta);
      } else {
        m(row, 0) += axis * s * std::cos(theta);
        m(row, 1) += axis * s * std::sin(theta);
      }
      const double radius =
          config.ring_base + config.ring_delta * std::tanh(config.ring_sharpness * s);
      const double angle = config.ring_turns * M_PI * std::abs(s);
      m(row, 2) = radius * std::cos(angle);
      m(row, 3) = radius * std::sin(angle);
    } else {
      result.neutral.push_back(i);
    }
    for (Index j = 0; j < config.sem_dims; ++j)
      m(row, 4 + j) = config.sem_scale * amplitude[j] *
                      std::sin(omega1[j] * z1 + omega2[j] * z2 + phase[j]);
    for (Index j = 0; j < d; ++j) m(row, j) += config.noise * (2.0 * vec_rng.next_double() - 1.0);
  }

  result.space = make_space(words, m);
  result.strength = std::move(strength);
  result.config = config;
  return result;
}

/// Writes a similarity benchmark whose human scores follow the semantic
/// cosine of neutral-word pairs, with a pinch of rating noise.
inline void write_similarity_tsv(const GenderedSpace& gendered, const std::string& path,
                                 std::size_t pairs, std::uint64_t seed) {
  const auto& neutral = gendered.neutral;
  wordbias::require(neutral.size() >= 2, wordbias::errc::invalid,
                    "write_similarity_tsv: not enough neutral words");
  Rng rng(seed);
  std::ofstream out(path, std::ios::trunc);
  const auto& space = gendered.space;
  for (std::size_t p = 0; p < pairs; ++p) {
    const std::size_t i = neutral[rng.below(neutral.size())];
    std::size_t j = neutral[rng.below(neutral.size())];
    while (j == i) j = neutral[rng.below(neutral.size())];
    const Vector vi = space.matrix.row(static_cast<Index>(i)).transpose();
    const Vector vj = space.matrix.row(static_cast<Index>(j)).transpose();
    const double score = 5.0 * (1.0 + wordbias::cosine(vi, vj)) + 0.15 * rng.next_double();
    out << space.vocab.word(i) << '\t' << space.vocab.word(j) << '\t'
        << wordbias::format_double(score, 6) << '\n';
  }
}

}  // namespace fixtures
