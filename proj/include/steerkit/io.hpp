// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "steerkit/activations.hpp"
#include "steerkit/evals.hpp"
#include "steerkit/pairgen.hpp"
#include "steerkit/steering_vector.hpp"
#include "steerkit/toymodel.hpp"

namespace steer::io {

using Bytes = std::vector<std::uint8_t>;

// Binary interchange formats. Byte layouts are documented in docs/FORMATS.md.
// Decoders throw FormatError (bad magic, version, enum byte, invariant),
// UnexpectedEof (truncation, with the byte offset) or InvalidValue
// (non-finite float); they never read out of bounds.

/// ACTV v1: activations, float32 payload. Doubles are rounded to float32 on
/// encode, so decode(encode(x)) is exact only for float32-representable data.
Bytes encode_actv(const ActivationSet& acts);
ActivationSet decode_actv(std::span<const std::uint8_t> bytes);

/// SVEC v1: steering vector, float64 payload.
Bytes encode_svec(const SteeringVector& vector);
SteeringVector decode_svec(std::span<const std::uint8_t> bytes);

// Text formats.

/// EMB1: header "EMB1 <dim>", then one tab-separated record per candidate:
/// statement_id, stance (+/-), category, escaped text, space-separated values.
std::string encode_embeddings(const std::vector<CandidatePrompt>& candidates);
std::vector<CandidatePrompt> decode_embeddings(std::string_view text);

/// LEX1 JSON lexicon.
std::string encode_lexicon(const BiasLexicon& lexicon);
BiasLexicon decode_lexicon(std::string_view text);

/// REPORT1 JSON bias report.
std::string encode_report(const BiasReport& report);
BiasReport decode_report(std::string_view text);

/// PAIRS1 TSV (output of pair generation).
std::string encode_pairs(const std::vector<ContrastivePair>& pairs);

struct PromptRecord {
  std::uint64_t id = 0;
  Stance stance = Stance::kPositive;
  std::string text;
};

/// PROMPTS1 TSV: id, stance (+/-), escaped text.
std::string encode_prompts(const std::vector<PromptRecord>& prompts);
std::vector<PromptRecord> decode_prompts(std::string_view text);
/// Positive and negative prompt of pair k become ids 2k and 2k+1.
std::vector<PromptRecord> prompts_from_pairs(const std::vector<ContrastivePair>& pairs);
std::vector<PromptRecord> decode_pairs_as_prompts(std::string_view text);

/// RESP1 JSON: baseline/steered response pairs to evaluate.
struct ResponseSet {
  std::string model_id = "unknown";
  LanguageTag language;
  std::string method = "isv";
  double alpha = 1.0;
  std::vector<ResponsePairInput> items;
};
std::string encode_responses(const ResponseSet& responses);
ResponseSet decode_responses(std::string_view text);

/// GEN1 JSON: generated continuations. Token ids are authoritative; the text
/// field is always rederived from them (byte decoding, ill-formed UTF-8
/// replaced by U+FFFD) on both encode and decode.
struct GenerationRecord {
  std::uint64_t id = 0;
  std::string prompt;
  std::vector<int> tokens;
  std::string text;
};
struct GenerationSet {
  std::string model_id = "toy";
  std::string method = "none";
  double alpha = 0.0;
  std::vector<int> layers;
  std::vector<GenerationRecord> items;
};
std::string encode_generations(const GenerationSet& generations);
GenerationSet decode_generations(std::string_view text);

std::string escape_field(std::string_view raw);
std::string unescape_field(std::string_view escaped);

// Files.
Bytes read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file(const std::filesystem::path& path, std::string_view text);

ActivationSet read_actv(const std::filesystem::path& path);
void write_actv(const std::filesystem::path& path, const ActivationSet& acts);
SteeringVector read_svec(const std::filesystem::path& path);
void write_svec(const std::filesystem::path& path, const SteeringVector& vector);

}  // namespace steer::io
