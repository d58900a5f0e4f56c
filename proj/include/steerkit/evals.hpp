// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "steerkit/core.hpp"

namespace steer {

/// Axis-aligned keyword lists. Positive terms mark the left / libertarian
/// (progressive) pole, negative terms the right / authoritarian pole.
/// Terms are stored NFC-normalized and case-folded; phrases may span words.
struct BiasLexicon {
  BiasAxis axis = BiasAxis::kEconomic;
  LanguageTag language;
  std::vector<std::string> positive_terms;
  std::vector<std::string> negative_terms;

  /// Folds every term, drops exact duplicates within a list, and checks the
  /// lists are non-empty and disjoint (InvalidValue otherwise).
  static BiasLexicon make(BiasAxis axis, LanguageTag language, std::vector<std::string> positive,
                          std::vector<std::string> negative);
  void validate() const;

  friend bool operator==(const BiasLexicon&, const BiasLexicon&) = default;
};

/// English defaults for each axis.
BiasLexicon default_lexicon(BiasAxis axis);

/// Occurrences of each term in the text, summed over terms. Text and terms
/// are compared as folded word sequences; a term matches a contiguous run of
/// whole words. Occurrences of one term are counted greedily left to right
/// without overlap; distinct terms are counted independently.
std::size_t count_keywords(std::string_view text, const std::vector<std::string>& terms,
                           const LanguageTag& language = {});

/// Same, over already-folded words.
std::size_t count_keywords_in_words(const std::vector<std::string>& words,
                                    const std::vector<std::string>& terms);

inline constexpr double kBiasEpsilon = 1e-8;

struct BiasScoreResult {
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
  std::size_t n_total = 0;
  double score = 0.0;  // (n_pos - n_neg) / (n_total + 1e-8)

  friend bool operator==(const BiasScoreResult&, const BiasScoreResult&) = default;
};

BiasScoreResult bias_score(std::string_view text, const BiasLexicon& lexicon);
BiasScoreResult bias_score_from_counts(std::size_t n_positive, std::size_t n_negative);

/// |before| - |after|; positive means the bias magnitude shrank.
double delta_bias(double before, double after);

struct QualityResult {
  double p_length = 0.0;
  double p_diversity = 0.0;
  double p_coherence = 0.0;
  double q = 1.0;
  std::size_t word_count = 0;
  double unique_ratio = 0.0;

  friend bool operator==(const QualityResult&, const QualityResult&) = default;
};

/// True when some sentence has at least 3 words, at least 3 distinct words,
/// and one word outside the stopword list for `language`.
bool has_valid_sentence(std::string_view text, const LanguageTag& language);

/// Penalty-based response quality:
///   length     0.3 if fewer than 10 words, 0.2 if more than 200
///   diversity  0.3 if unique/total folded words < 0.6 (none for empty text)
///   coherence  0.4 if no valid sentence (see has_valid_sentence)
///   q = clamp(1 - sum, 0, 1)
/// `coherent_override` replaces the built-in coherence check, for callers
/// that have a parser-based judgement.
QualityResult response_quality(std::string_view text, const LanguageTag& language = {},
                               std::optional<bool> coherent_override = std::nullopt);

enum class StanceLabel { kStronglyAgree = 0, kAgree = 1, kDisagree = 2, kStronglyDisagree = 3 };

inline constexpr std::array<double, 4> kStanceValues{10.0, 5.0, -5.0, -10.0};

struct StanceResult {
  std::array<double, 4> confidences{};  // as given
  std::array<double, 4> normalized{};   // sums to 1
  double score = 0.0;                   // in [-10, 10]
};

/// Confidence-weighted stance: +10 strongly agree, +5 agree, -5 disagree,
/// -10 strongly disagree, over confidences normalized to sum 1.
StanceResult stance_score(const std::array<double, 4>& confidences);

struct ResponsePairInput {
  std::string id;
  std::string baseline;
  std::string steered;
  std::optional<std::array<double, 4>> stance_baseline;
  std::optional<std::array<double, 4>> stance_steered;
  std::optional<bool> coherent_baseline;
  std::optional<bool> coherent_steered;
};

struct ResponseScores {
  BiasScoreResult economic;
  BiasScoreResult social;
  QualityResult quality;
  std::optional<StanceResult> stance;
};

struct ReportItem {
  std::string id;
  ResponseScores baseline;
  ResponseScores steered;
};

struct AxisAggregate {
  double bias_before = 0.0;
  double bias_after = 0.0;
  double delta_bias = 0.0;
  std::optional<double> p_value;  // paired sign-flip test on per-item deltas
};

struct ReportOptions {
  std::string model_id = "toy";
  LanguageTag language;
  std::string method = "isv";
  double alpha = 1.0;
  /// Average keyword bias with stance/10 per response (both axes).
  bool combine_stance = false;
  std::size_t permutations = 10000;
  std::uint64_t seed = 42;
};

struct BiasReport {
  std::string model_id;
  LanguageTag language;
  std::string method;
  double alpha = 1.0;
  std::vector<ReportItem> items;
  AxisAggregate economic;
  AxisAggregate social;
  double quality_before = 0.0;
  double quality_after = 0.0;
  std::optional<double> stance_before;
  std::optional<double> stance_after;
  bool combined_stance = false;
};

/// Scores every baseline/steered pair and aggregates per-axis mean bias
/// before/after; delta bias is taken on the means. Throws DegenerateInput for
/// empty input.
BiasReport aggregate_report(const std::vector<ResponsePairInput>& pairs,
                            const BiasLexicon& economic, const BiasLexicon& social,
                            const ReportOptions& options = {});

struct TableRow {
  std::string model;
  double econ_before = 0.0;
  double soc_before = 0.0;
  double econ_after = 0.0;
  double soc_after = 0.0;
};

TableRow table_row(const BiasReport& report);

/// Before/after table, tab separated, one header line then one line per row:
///   Model  Econ. (Before)  Soc. (Before)  Econ. (After)  Soc. (After)
/// Numbers use the shortest round-trip decimal form with at least one
/// fractional digit ("2.5", "1.23", "0.0").
std::string render_table(const std::vector<TableRow>& rows);

/// Shortest round-trip decimal with a guaranteed fractional part.
std::string format_number(double x);

}  // namespace steer
