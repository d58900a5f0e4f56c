// SPDX-License-Identifier: Apache-2.0

#include "steerkit/core.hpp"

#include <algorithm>
#include <cctype>

namespace steer {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kInvalidValue: return "InvalidValue";
    case ErrorCode::kShape: return "ShapeError";
    case ErrorCode::kZeroNorm: return "ZeroNormError";
    case ErrorCode::kNoPairsPossible: return "NoPairsPossible";
    case ErrorCode::kAllZeroQuality: return "AllZeroQuality";
    case ErrorCode::kAxisMismatch: return "AxisMismatch";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kSequenceTooLong: return "SequenceTooLong";
    case ErrorCode::kFormat: return "FormatError";
    case ErrorCode::kUnexpectedEof: return "UnexpectedEof";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(BiasAxis axis) {
  return axis == BiasAxis::kEconomic ? "economic" : "social";
}

std::string_view to_string(Stance stance) {
  return stance == Stance::kPositive ? "positive" : "negative";
}

namespace {
std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}
}  // namespace

BiasAxis parse_axis(std::string_view text) {
  const std::string t = lower(text);
  if (t == "economic" || t == "econ") return BiasAxis::kEconomic;
  if (t == "social" || t == "soc") return BiasAxis::kSocial;
  throw ConfigError("unknown bias axis '" + std::string(text) + "'");
}

Stance parse_stance(std::string_view text) {
  const std::string t = lower(text);
  if (t == "positive" || t == "pos" || t == "+" || t == "1") return Stance::kPositive;
  if (t == "negative" || t == "neg" || t == "-" || t == "0") return Stance::kNegative;
  throw ConfigError("unknown stance '" + std::string(text) + "'");
}

bool LanguageTag::is_valid(std::string_view code) {
  return !code.empty() &&
         std::all_of(code.begin(), code.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

LanguageTag::LanguageTag(std::string code) : code_(std::move(code)) {
  if (!is_valid(code_)) {
    throw InvalidValue("language tag must be non-empty lowercase ASCII letters, got '" +
                       code_ + "'");
  }
}

}  // namespace steer
