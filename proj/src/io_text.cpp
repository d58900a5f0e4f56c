// SPDX-License-Identifier: Apache-2.0

#include <json.hpp>
#include <unicode/unistr.h>

#include <charconv>
#include <cmath>
#include <sstream>

#include "steerkit/io.hpp"

namespace steer::io {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

// Byte decoding of tokens with ill-formed UTF-8 replaced by U+FFFD.
std::string token_text(const std::vector<int>& tokens) {
  for (int t : tokens) {
    if (t < 0 || t > 255) throw FormatError("GEN1 token id " + std::to_string(t) + " outside 0..255");
  }
  const std::string raw = decode_bytes(tokens);
  std::string out;
  icu::UnicodeString::fromUTF8(icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())))
      .toUTF8String(out);
  return out;
}

}  // namespace

std::string escape_field(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_field(std::string_view escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    if (escaped[i] != '\\') {
      out += escaped[i];
      continue;
    }
    if (++i == escaped.size()) throw FormatError("dangling escape at end of field");
    switch (escaped[i]) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      default: throw FormatError(std::string("unknown escape \\") + escaped[i]);
    }
  }
  return out;
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = s.find(sep, start);
    if (at == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, at - start));
    start = at + 1;
  }
}

/// Lines without their terminators; a trailing newline does not produce an
/// empty final line.
std::vector<std::string_view> lines_of(std::string_view text) {
  auto ls = split(text, '\n');
  if (!ls.empty() && ls.back().empty()) ls.pop_back();
  for (auto& l : ls) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  }
  return ls;
}

std::string where(std::string_view format, std::size_t line) {
  return std::string(format) + " line " + std::to_string(line + 1) + ": ";
}

double parse_double(std::string_view s, std::string_view format, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError(where(format, line) + "bad number '" + std::string(s) + "'");
  }
  if (!std::isfinite(v)) throw InvalidValue(where(format, line) + "non-finite value");
  return v;
}

template <typename Int>
Int parse_int(std::string_view s, std::string_view format, std::size_t line) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
    throw FormatError(where(format, line) + "bad integer '" + std::string(s) + "'");
  }
  return v;
}

std::string num(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Stance parse_stance_sign(std::string_view s, std::string_view format, std::size_t line) {
  if (s == "+") return Stance::kPositive;
  if (s == "-") return Stance::kNegative;
  throw FormatError(where(format, line) + "stance must be '+' or '-', got '" + std::string(s) + "'");
}

const char* stance_sign(Stance s) { return s == Stance::kPositive ? "+" : "-"; }

json parse_json(std::string_view text, std::string_view format) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(format) + ": " + e.what());
  }
}

template <typename F>
auto json_guard(std::string_view format, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw FormatError(std::string(format) + ": " + e.what());
  }
}

void expect_format(const json& j, std::string_view tag) {
  if (!j.is_object() || !j.contains("format") || j.at("format") != tag) {
    throw FormatError(std::string(tag) + ": missing or wrong \"format\" tag");
  }
}

std::string dump(const ordered_json& j) {
  return j.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

}  // namespace

// ---- EMB1 ----

std::string encode_embeddings(const std::vector<CandidatePrompt>& candidates) {
  if (candidates.empty()) throw DegenerateInput("encode_embeddings: no candidates");
  const Eigen::Index dim = candidates.front().embedding.size();
  std::string out = "EMB1 " + std::to_string(dim) + "\n";
  for (const auto& c : candidates) {
    if (c.embedding.size() != dim) throw ShapeError("encode_embeddings: mixed embedding sizes");
    if (c.category.empty() || c.category.find_first_of("\t\n\r") != std::string::npos) {
      throw InvalidValue("encode_embeddings: category must be non-empty without tabs/newlines");
    }
    out += std::to_string(c.statement_id) + '\t' + stance_sign(c.stance) + '\t' + c.category +
           '\t' + escape_field(c.text) + '\t';
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (i) out += ' ';
      out += num(c.embedding(i));
    }
    out += '\n';
  }
  return out;
}

std::vector<CandidatePrompt> decode_embeddings(std::string_view text) {
  constexpr std::string_view kFmt = "EMB1";
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0].substr(0, 5) != "EMB1 ") {
    throw FormatError("EMB1 line 1: missing 'EMB1 <dim>' header");
  }
  const auto dim = parse_int<std::uint32_t>(lines[0].substr(5), kFmt, 0);
  if (dim == 0) throw FormatError("EMB1 line 1: dimension must be >= 1");
  std::vector<CandidatePrompt> out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty() || lines[li].front() == '#') continue;
    const auto fields = split(lines[li], '\t');
    if (fields.size() != 5) {
      throw FormatError(where(kFmt, li) + "expected 5 tab-separated fields, got " +
                        std::to_string(fields.size()));
    }
    CandidatePrompt c;
    c.statement_id = parse_int<int>(fields[0], kFmt, li);
    c.stance = parse_stance_sign(fields[1], kFmt, li);
    if (fields[2].empty()) throw FormatError(where(kFmt, li) + "empty category");
    c.category = std::string(fields[2]);
    c.text = unescape_field(fields[3]);
    const auto values = split(fields[4], ' ');
    if (values.size() != dim) {
      throw FormatError(where(kFmt, li) + "embedding has " + std::to_string(values.size()) +
                        " values, header says " + std::to_string(dim));
    }
    c.embedding.resize(dim);
    for (std::uint32_t i = 0; i < dim; ++i) c.embedding(i) = parse_double(values[i], kFmt, li);
    out.push_back(std::move(c));
  }
  return out;
}

// ---- LEX1 ----

std::string encode_lexicon(const BiasLexicon& lexicon) {
  lexicon.validate();
  ordered_json j;
  j["format"] = "LEX1";
  j["axis"] = std::string(to_string(lexicon.axis));
  j["language"] = lexicon.language.code();
  j["positive"] = lexicon.positive_terms;
  j["negative"] = lexicon.negative_terms;
  return dump(j);
}

BiasLexicon decode_lexicon(std::string_view text) {
  const json j = parse_json(text, "LEX1");
  expect_format(j, "LEX1");
  return json_guard("LEX1", [&] {
    return BiasLexicon::make(parse_axis(j.at("axis").get<std::string>()),
                             LanguageTag(j.at("language").get<std::string>()),
                             j.at("positive").get<std::vector<std::string>>(),
                             j.at("negative").get<std::vector<std::string>>());
  });
}

// ---- REPORT1 ----

namespace {

ordered_json bias_json(const BiasScoreResult& b) {
  ordered_json j;
  j["n_positive"] = b.n_positive;
  j["n_negative"] = b.n_negative;
  j["n_total"] = b.n_total;
  j["score"] = b.score;
  return j;
}

BiasScoreResult bias_from(const json& j) {
  BiasScoreResult b;
  b.n_positive = j.at("n_positive").get<std::size_t>();
  b.n_negative = j.at("n_negative").get<std::size_t>();
  b.n_total = j.at("n_total").get<std::size_t>();
  b.score = j.at("score").get<double>();
  if (b.n_total != b.n_positive + b.n_negative) throw FormatError("REPORT1: n_total mismatch");
  return b;
}

ordered_json scores_json(const ResponseScores& s) {
  ordered_json j;
  j["economic"] = bias_json(s.economic);
  j["social"] = bias_json(s.social);
  ordered_json q;
  q["p_length"] = s.quality.p_length;
  q["p_diversity"] = s.quality.p_diversity;
  q["p_coherence"] = s.quality.p_coherence;
  q["q"] = s.quality.q;
  q["word_count"] = s.quality.word_count;
  q["unique_ratio"] = s.quality.unique_ratio;
  j["quality"] = q;
  if (s.stance) {
    ordered_json st;
    st["confidences"] = s.stance->confidences;
    st["normalized"] = s.stance->normalized;
    st["score"] = s.stance->score;
    j["stance"] = st;
  } else {
    j["stance"] = nullptr;
  }
  return j;
}

ResponseScores scores_from(const json& j) {
  ResponseScores s;
  s.economic = bias_from(j.at("economic"));
  s.social = bias_from(j.at("social"));
  const json& q = j.at("quality");
  s.quality.p_length = q.at("p_length").get<double>();
  s.quality.p_diversity = q.at("p_diversity").get<double>();
  s.quality.p_coherence = q.at("p_coherence").get<double>();
  s.quality.q = q.at("q").get<double>();
  s.quality.word_count = q.at("word_count").get<std::size_t>();
  s.quality.unique_ratio = q.at("unique_ratio").get<double>();
  if (!j.at("stance").is_null()) {
    StanceResult st;
    st.confidences = j.at("stance").at("confidences").get<std::array<double, 4>>();
    st.normalized = j.at("stance").at("normalized").get<std::array<double, 4>>();
    st.score = j.at("stance").at("score").get<double>();
    s.stance = st;
  }
  return s;
}

template <typename T>
ordered_json opt(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

template <typename T>
std::optional<T> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

ordered_json axis_json(const AxisAggregate& a) {
  ordered_json j;
  j["bias_before"] = a.bias_before;
  j["bias_after"] = a.bias_after;
  j["delta_bias"] = a.delta_bias;
  j["p_value"] = opt(a.p_value);
  return j;
}

AxisAggregate axis_from(const json& j) {
  AxisAggregate a;
  a.bias_before = j.at("bias_before").get<double>();
  a.bias_after = j.at("bias_after").get<double>();
  a.delta_bias = j.at("delta_bias").get<double>();
  a.p_value = opt_from<double>(j, "p_value");
  return a;
}

}  // namespace

std::string encode_report(const BiasReport& report) {
  ordered_json j;
  j["format"] = "REPORT1";
  j["model_id"] = report.model_id;
  j["language"] = report.language.code();
  j["method"] = report.method;
  j["alpha"] = report.alpha;
  j["combined_stance"] = report.combined_stance;
  ordered_json agg;
  agg["economic"] = axis_json(report.economic);
  agg["social"] = axis_json(report.social);
  agg["quality_before"] = report.quality_before;
  agg["quality_after"] = report.quality_after;
  agg["stance_before"] = opt(report.stance_before);
  agg["stance_after"] = opt(report.stance_after);
  j["aggregate"] = agg;
  ordered_json items = ordered_json::array();
  for (const auto& it : report.items) {
    ordered_json e;
    e["id"] = it.id;
    e["baseline"] = scores_json(it.baseline);
    e["steered"] = scores_json(it.steered);
    items.push_back(e);
  }
  j["items"] = items;
  return dump(j);
}

BiasReport decode_report(std::string_view text) {
  const json j = parse_json(text, "REPORT1");
  expect_format(j, "REPORT1");
  return json_guard("REPORT1", [&] {
    BiasReport r;
    r.model_id = j.at("model_id").get<std::string>();
    r.language = LanguageTag(j.at("language").get<std::string>());
    r.method = j.at("method").get<std::string>();
    r.alpha = j.at("alpha").get<double>();
    r.combined_stance = j.at("combined_stance").get<bool>();
    const json& agg = j.at("aggregate");
    r.economic = axis_from(agg.at("economic"));
    r.social = axis_from(agg.at("social"));
    r.quality_before = agg.at("quality_before").get<double>();
    r.quality_after = agg.at("quality_after").get<double>();
    r.stance_before = opt_from<double>(agg, "stance_before");
    r.stance_after = opt_from<double>(agg, "stance_after");
    for (const auto& e : j.at("items")) {
      ReportItem it;
      it.id = e.at("id").get<std::string>();
      it.baseline = scores_from(e.at("baseline"));
      it.steered = scores_from(e.at("steered"));
      r.items.push_back(std::move(it));
    }
    return r;
  });
}

// ---- PAIRS1 / PROMPTS1 ----

std::string encode_pairs(const std::vector<ContrastivePair>& pairs) {
  std::string out =
      "PAIRS1\ncategory\tpositive_id\tnegative_id\tsimilarity\tpositive_text\tnegative_text\n";
  for (const auto& p : pairs) {
    out += p.category + '\t' + std::to_string(p.positive.statement_id) + '\t' +
           std::to_string(p.negative.statement_id) + '\t' + num(p.similarity) + '\t' +
           escape_field(p.positive.text) + '\t' + escape_field(p.negative.text) + '\n';
  }
  return out;
}

std::vector<PromptRecord> prompts_from_pairs(const std::vector<ContrastivePair>& pairs) {
  std::vector<PromptRecord> out;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    out.push_back({2 * k, Stance::kPositive, pairs[k].positive.text});
    out.push_back({2 * k + 1, Stance::kNegative, pairs[k].negative.text});
  }
  return out;
}

std::vector<PromptRecord> decode_pairs_as_prompts(std::string_view text) {
  constexpr std::string_view kFmt = "PAIRS1";
  const auto lines = lines_of(text);
  if (lines.size() < 2 || lines[0] != "PAIRS1") throw FormatError("PAIRS1 line 1: missing header");
  std::vector<PromptRecord> out;
  std::uint64_t k = 0;
  for (std::size_t li = 2; li < lines.size(); ++li) {
    const auto f = split(lines[li], '\t');
    if (f.size() != 6) throw FormatError(where(kFmt, li) + "expected 6 fields");
    out.push_back({2 * k, Stance::kPositive, unescape_field(f[4])});
    out.push_back({2 * k + 1, Stance::kNegative, unescape_field(f[5])});
    ++k;
  }
  return out;
}

std::string encode_prompts(const std::vector<PromptRecord>& prompts) {
  std::string out = "PROMPTS1\n";
  for (const auto& p : prompts) {
    out += std::to_string(p.id) + '\t' + stance_sign(p.stance) + '\t' + escape_field(p.text) + '\n';
  }
  return out;
}

std::vector<PromptRecord> decode_prompts(std::string_view text) {
  constexpr std::string_view kFmt = "PROMPTS1";
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != "PROMPTS1") throw FormatError("PROMPTS1 line 1: missing header");
  std::vector<PromptRecord> out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty() || lines[li].front() == '#') continue;
    const auto f = split(lines[li], '\t');
    if (f.size() != 3) throw FormatError(where(kFmt, li) + "expected 3 fields");
    out.push_back({parse_int<std::uint64_t>(f[0], kFmt, li), parse_stance_sign(f[1], kFmt, li),
                   unescape_field(f[2])});
  }
  return out;
}

// ---- RESP1 ----

std::string encode_responses(const ResponseSet& responses) {
  ordered_json j;
  j["format"] = "RESP1";
  j["model_id"] = responses.model_id;
  j["language"] = responses.language.code();
  j["method"] = responses.method;
  j["alpha"] = responses.alpha;
  ordered_json items = ordered_json::array();
  for (const auto& it : responses.items) {
    ordered_json e;
    e["id"] = it.id;
    e["baseline"] = it.baseline;
    e["steered"] = it.steered;
    e["stance_baseline"] = opt(it.stance_baseline);
    e["stance_steered"] = opt(it.stance_steered);
    e["coherent_baseline"] = opt(it.coherent_baseline);
    e["coherent_steered"] = opt(it.coherent_steered);
    items.push_back(e);
  }
  j["items"] = items;
  return dump(j);
}

ResponseSet decode_responses(std::string_view text) {
  const json j = parse_json(text, "RESP1");
  expect_format(j, "RESP1");
  return json_guard("RESP1", [&] {
    ResponseSet r;
    r.model_id = j.at("model_id").get<std::string>();
    r.language = LanguageTag(j.at("language").get<std::string>());
    r.method = j.at("method").get<std::string>();
    r.alpha = j.at("alpha").get<double>();
    for (const auto& e : j.at("items")) {
      ResponsePairInput it;
      it.id = e.at("id").get<std::string>();
      it.baseline = e.at("baseline").get<std::string>();
      it.steered = e.at("steered").get<std::string>();
      it.stance_baseline = opt_from<std::array<double, 4>>(e, "stance_baseline");
      it.stance_steered = opt_from<std::array<double, 4>>(e, "stance_steered");
      it.coherent_baseline = opt_from<bool>(e, "coherent_baseline");
      it.coherent_steered = opt_from<bool>(e, "coherent_steered");
      r.items.push_back(std::move(it));
    }
    return r;
  });
}

// ---- GEN1 ----

std::string encode_generations(const GenerationSet& g) {
  ordered_json j;
  j["format"] = "GEN1";
  j["model_id"] = g.model_id;
  j["method"] = g.method;
  j["alpha"] = g.alpha;
  j["layers"] = g.layers;
  ordered_json items = ordered_json::array();
  for (const auto& it : g.items) {
    ordered_json e;
    e["id"] = it.id;
    e["prompt"] = it.prompt;
    e["tokens"] = it.tokens;
    e["text"] = token_text(it.tokens);
    items.push_back(e);
  }
  j["items"] = items;
  return dump(j);
}

GenerationSet decode_generations(std::string_view text) {
  const json j = parse_json(text, "GEN1");
  expect_format(j, "GEN1");
  return json_guard("GEN1", [&] {
    GenerationSet g;
    g.model_id = j.at("model_id").get<std::string>();
    g.method = j.at("method").get<std::string>();
    g.alpha = j.at("alpha").get<double>();
    g.layers = j.at("layers").get<std::vector<int>>();
    for (const auto& e : j.at("items")) {
      GenerationRecord r;
      r.id = e.at("id").get<std::uint64_t>();
      r.prompt = e.at("prompt").get<std::string>();
      r.tokens = e.at("tokens").get<std::vector<int>>();
      r.text = token_text(r.tokens);
      g.items.push_back(std::move(r));
    }
    return g;
  });
}

}  // namespace steer::io
