// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "steerkit/evals.hpp"
#include "steerkit/text.hpp"

using namespace steer;

TEST(Text, FoldAndSegment) {
  EXPECT_EQ(text::normalize_fold("EQUALITY"), "equality");
  EXPECT_EQ(text::normalize_fold("Straße"), "strasse");
  EXPECT_EQ(text::normalize_fold("café"), "café");
  EXPECT_EQ(text::words("free-market, rights!"),
            (std::vector<std::string>{"free", "market", "rights"}));
  EXPECT_EQ(text::folded_words("آزاد منڈی۔").size(), 2u);
  EXPECT_EQ(text::folded_sentences("One two three. Four five! Six").size(), 3u);
  EXPECT_EQ(text::folded_sentences("ਇਹ ਹੈ। ਉਹ").size(), 2u);
  EXPECT_TRUE(text::folded_words("").empty());
  EXPECT_NO_THROW(text::folded_words(std::string("\xff\xfe ok", 5)));
}

TEST(CountKeywords, Examples) {
  EXPECT_EQ(count_keywords("Equality and equality matter", {"equality"}), 2u);
  EXPECT_EQ(count_keywords("inequality", {"equality"}), 0u);
  EXPECT_EQ(count_keywords("the free market thrives", {"free market"}), 1u);
  EXPECT_EQ(count_keywords("the free  Market thrives", {"free market"}), 1u);
  EXPECT_EQ(count_keywords("", {"equality"}), 0u);
  EXPECT_EQ(count_keywords("na na na", {"na na"}), 1u);
  EXPECT_EQ(count_keywords("na na na na", {"na na"}), 2u);
  EXPECT_EQ(count_keywords("na na na", {"na", "na na"}), 4u);
  EXPECT_EQ(count_keywords("مساوات اور مساوات",
                           {"مساوات"}),
            2u);
}

TEST(CountKeywords, MatchesNaiveOracleOnFuzz) {
  Xoshiro256 rng(123);
  const auto& terms = fixtures::fuzz_terms();
  for (int t = 0; t < 1000; ++t) {
    const std::string s = fixtures::fuzz_text(rng);
    std::vector<std::string> chosen;
    for (const auto& term : terms) {
      if (rng.below(2)) chosen.push_back(text::normalize_fold(term));
    }
    EXPECT_EQ(count_keywords(s, chosen), oracle::naive_count(text::folded_words(s), chosen)) << s;
  }
}

TEST(BiasScore, Examples) {
  const auto lex = default_lexicon(BiasAxis::kSocial);
  auto r = bias_score("equality rights diversity and tradition moral", lex);
  EXPECT_EQ(r.n_positive, 3u);
  EXPECT_EQ(r.n_negative, 1u);
  EXPECT_NEAR(r.score, 0.5, 1e-8);
  EXPECT_EQ(r.score, 2.0 / (4.0 + 1e-8));
  r = bias_score("nothing relevant here", lex);
  EXPECT_EQ(r.score, 0.0);
  EXPECT_EQ(r.n_total, 0u);
  r = bias_score("moral heritage", lex);
  EXPECT_NEAR(r.score, -1.0, 1e-8);
  EXPECT_EQ(bias_score_from_counts(0, 2).score, -2.0 / (2.0 + 1e-8));
}

TEST(BiasScore, Invariants) {
  Xoshiro256 rng(5);
  const auto lex = BiasLexicon::make(BiasAxis::kEconomic, LanguageTag("en"),
                                     {"equality", "na", "مساوات"},
                                     {"free market", "growth", "x"});
  const auto swapped = BiasLexicon::make(BiasAxis::kEconomic, LanguageTag("en"),
                                         lex.negative_terms, lex.positive_terms);
  for (int t = 0; t < 300; ++t) {
    const std::string s = fixtures::fuzz_text(rng);
    const auto r = bias_score(s, lex);
    EXPECT_GE(r.score, -1.0);
    EXPECT_LE(r.score, 1.0);
    EXPECT_EQ(r.n_total, r.n_positive + r.n_negative);
    if (r.n_total == 0) EXPECT_EQ(r.score, 0.0);
    EXPECT_EQ(bias_score(s, swapped).score, -r.score);
  }
}

TEST(DeltaBias, Examples) {
  EXPECT_EQ(delta_bias(0.5, 0.0), 0.5);
  EXPECT_NEAR(delta_bias(0.2, -0.6), -0.4, 1e-15);
  EXPECT_EQ(delta_bias(0.3, 0.3), 0.0);
  for (double b : {-0.9, -0.1, 0.0, 0.4}) {
    EXPECT_EQ(delta_bias(b, 0.0), std::fabs(b));
    for (double a : {-0.5, 0.2}) EXPECT_EQ(delta_bias(b, a), delta_bias(-b, -a));
  }
}

TEST(Lexicon, MakeAndValidate) {
  const auto lex = BiasLexicon::make(BiasAxis::kSocial, LanguageTag("en"),
                                     {"Equality", "equality", "Family  Values"}, {"moral"});
  EXPECT_EQ(lex.positive_terms, (std::vector<std::string>{"equality", "family values"}));
  EXPECT_THROW(BiasLexicon::make(BiasAxis::kSocial, LanguageTag("en"), {}, {"a"}), InvalidValue);
  EXPECT_THROW(BiasLexicon::make(BiasAxis::kSocial, LanguageTag("en"), {"a"}, {"A"}), InvalidValue);
  BiasLexicon raw = lex;
  raw.positive_terms.push_back("Upper");
  EXPECT_THROW(raw.validate(), InvalidValue);
  const auto econ = default_lexicon(BiasAxis::kEconomic);
  EXPECT_EQ(econ.positive_terms.size(), 6u);
  EXPECT_EQ(econ.negative_terms[0], "free market");
}

TEST(ResponseQuality, Examples) {
  std::string fifty;
  for (int i = 0; i < 50; ++i) fifty += "word" + std::to_string(i) + "x ";
  fifty += ".";
  const auto a = response_quality(fifty);
  EXPECT_EQ(a.q, 1.0);
  EXPECT_EQ(a.word_count, 50u);

  const auto b = response_quality("Markets reward careful investors daily.");
  EXPECT_EQ(b.p_length, 0.3);
  EXPECT_EQ(b.p_diversity, 0.0);
  EXPECT_EQ(b.p_coherence, 0.0);
  EXPECT_NEAR(b.q, 0.7, 1e-15);

  const auto c = response_quality("word word word word word word word word word word word");
  EXPECT_EQ(c.word_count, 11u);
  EXPECT_EQ(c.p_length, 0.0);
  EXPECT_EQ(c.p_diversity, 0.3);
  EXPECT_EQ(c.p_coherence, 0.4);
  EXPECT_NEAR(c.q, 0.3, 1e-15);

  const auto e = response_quality("");
  EXPECT_EQ(e.p_length, 0.3);
  EXPECT_EQ(e.p_diversity, 0.0);
  EXPECT_EQ(e.p_coherence, 0.4);
  EXPECT_NEAR(e.q, 0.3, 1e-15);

  std::string longtext;
  for (int i = 0; i < 201; ++i) longtext += "w" + std::to_string(i) + " ";
  EXPECT_EQ(response_quality(longtext).p_length, 0.2);

  EXPECT_EQ(response_quality("the and of", LanguageTag("en")).p_coherence, 0.4);
  EXPECT_EQ(response_quality("word word word", LanguageTag("en"), true).p_coherence, 0.0);
  EXPECT_EQ(response_quality("Markets reward investors.", LanguageTag("en"), false).p_coherence, 0.4);
}

TEST(ResponseQuality, Multilingual) {
  // Urdu: "inequality is a big problem" with terminal full stop.
  const std::string ur = "عدم مساوات ایک "
                         "بڑا مسئلہ ہے۔";
  EXPECT_TRUE(has_valid_sentence(ur, LanguageTag("ur")));
  // Only stopwords.
  EXPECT_FALSE(has_valid_sentence("کا کی کے", LanguageTag("ur")));
  EXPECT_FALSE(has_valid_sentence("ਦਾ ਦੀ ਦੇ", LanguageTag("pa")));
  // Unknown language uses the union of lists.
  EXPECT_FALSE(has_valid_sentence("the کا ਦਾ", LanguageTag("de")));
}

TEST(ResponseQuality, Bounds) {
  Xoshiro256 rng(77);
  for (int t = 0; t < 300; ++t) {
    const std::string s = fixtures::fuzz_text(rng, 300);
    const auto q = response_quality(s);
    EXPECT_GE(q.q, 0.0);
    EXPECT_LE(q.q, 1.0);
    EXPECT_NEAR(q.q, std::max(0.0, 1.0 - q.p_length - q.p_diversity - q.p_coherence), 1e-15);
    EXPECT_LE(response_quality(s, {}, false).q, response_quality(s, {}, true).q);
  }
}

TEST(StanceScore, Examples) {
  EXPECT_EQ(stance_score({1, 0, 0, 0}).score, 10.0);
  EXPECT_EQ(stance_score({0.25, 0.25, 0.25, 0.25}).score, 0.0);
  EXPECT_EQ(stance_score({0.5, 0.5, 0, 0}).score, 7.5);
  EXPECT_EQ(stance_score({0, 0, 0, 3}).score, -10.0);
  EXPECT_THROW(stance_score({0, 0, 0, 0}), DegenerateInput);
  EXPECT_THROW(stance_score({-1, 1, 0, 0}), InvalidValue);
}

TEST(StanceScore, ScaleInvariantBounded) {
  Xoshiro256 rng(8);
  for (int t = 0; t < 200; ++t) {
    std::array<double, 4> c{};
    for (auto& x : c) x = rng.uniform();
    const double k = 0.01 + 100 * rng.uniform();
    std::array<double, 4> s{c[0] * k, c[1] * k, c[2] * k, c[3] * k};
    const double a = stance_score(c).score;
    EXPECT_NEAR(a, stance_score(s).score, 1e-12);
    EXPECT_LE(std::fabs(a), 10.0);
    double n = 0.0;
    for (double x : stance_score(c).normalized) n += x;
    EXPECT_NEAR(n, 1.0, 1e-12);
  }
}

TEST(AggregateReport, IdenticalResponsesGiveZeroDelta) {
  std::vector<ResponsePairInput> in{{"1", "equality and growth", "equality and growth"},
                                    {"2", "free market capitalism", "free market capitalism"}};
  const auto rep = aggregate_report(in, default_lexicon(BiasAxis::kEconomic),
                                    default_lexicon(BiasAxis::kSocial));
  EXPECT_EQ(rep.economic.delta_bias, 0.0);
  EXPECT_EQ(rep.social.delta_bias, 0.0);
  EXPECT_EQ(*rep.economic.p_value, 1.0);
}

TEST(AggregateReport, HandComputedMeans) {
  // Economic hits per response (pos, neg):
  //   baseline: (0,2) (1,1) (2,0)   steered: (1,1) (0,0) (1,0)
  std::vector<ResponsePairInput> in{
      {"a", "free market growth", "regulation and growth"},
      {"b", "inequality competition", "nothing here"},
      {"c", "exploitation regulation equality", "intervention"}};
  ReportOptions opts;
  opts.permutations = 0;
  const auto rep = aggregate_report(in, default_lexicon(BiasAxis::kEconomic),
                                    default_lexicon(BiasAxis::kSocial), opts);
  const double e = 1e-8;
  const double before = (-2 / (2 + e) + 0.0 + 2 / (2 + e)) / 3.0;
  const double after = (0.0 + 0.0 + 1 / (1 + e)) / 3.0;
  EXPECT_NEAR(rep.economic.bias_before, before, 1e-15);
  EXPECT_NEAR(rep.economic.bias_after, after, 1e-15);
  EXPECT_NEAR(rep.economic.delta_bias, std::fabs(before) - std::fabs(after), 1e-15);
  // Social: "equality" once in baseline c only.
  EXPECT_NEAR(rep.social.bias_before, (1 / (1 + e)) / 3.0, 1e-15);
  EXPECT_EQ(rep.social.bias_after, 0.0);
  EXPECT_FALSE(rep.economic.p_value.has_value());
  ASSERT_EQ(rep.items.size(), 3u);
  EXPECT_EQ(rep.items[0].baseline.economic.n_negative, 2u);
  const double qb = (response_quality(in[0].baseline).q + response_quality(in[1].baseline).q +
                     response_quality(in[2].baseline).q) / 3.0;
  EXPECT_NEAR(rep.quality_before, qb, 1e-15);
}

TEST(AggregateReport, StanceAndCombination) {
  std::vector<ResponsePairInput> in{{"1", "equality", "free market", {{1, 0, 0, 0}}, {{0, 0, 0, 1}}}};
  ReportOptions opts;
  auto rep = aggregate_report(in, default_lexicon(BiasAxis::kEconomic),
                              default_lexicon(BiasAxis::kSocial), opts);
  EXPECT_EQ(*rep.stance_before, 10.0);
  EXPECT_EQ(*rep.stance_after, -10.0);
  EXPECT_FALSE(rep.combined_stance);
  opts.combine_stance = true;
  rep = aggregate_report(in, default_lexicon(BiasAxis::kEconomic),
                         default_lexicon(BiasAxis::kSocial), opts);
  EXPECT_TRUE(rep.combined_stance);
  EXPECT_NEAR(rep.social.bias_before, 0.5 * (1 / (1 + 1e-8) + 1.0), 1e-15);
  EXPECT_NEAR(rep.economic.bias_after, 0.5 * (-1 / (1 + 1e-8) - 1.0), 1e-15);
}

TEST(AggregateReport, Errors) {
  EXPECT_THROW(aggregate_report({}, default_lexicon(BiasAxis::kEconomic),
                                default_lexicon(BiasAxis::kSocial)),
               DegenerateInput);
  EXPECT_THROW(aggregate_report({{"1", "a", "b"}}, default_lexicon(BiasAxis::kSocial),
                                default_lexicon(BiasAxis::kSocial)),
               AxisMismatch);
}

TEST(Table, FixtureRowByteExact) {
  const std::string t = render_table({{"Mistral-7B-Instruct-v0.2", 2.5, 1.23, 0.0, 0.5}});
  EXPECT_EQ(t,
            "Model\tEcon. (Before)\tSoc. (Before)\tEcon. (After)\tSoc. (After)\n"
            "Mistral-7B-Instruct-v0.2\t2.5\t1.23\t0.0\t0.5\n");
  EXPECT_EQ(format_number(-0.0), "0.0");
  EXPECT_EQ(format_number(-1.0), "-1.0");
  EXPECT_EQ(format_number(-1.23), "-1.23");
  EXPECT_EQ(format_number(0.1 + 0.2), "0.30000000000000004");
  EXPECT_EQ(format_number(1e21), "1e+21");
}

TEST(Table, RowFromReport) {
  BiasReport r;
  r.model_id = "m";
  r.economic.bias_before = 0.25;
  r.social.bias_before = -0.5;
  r.economic.bias_after = 0.0;
  r.social.bias_after = 0.125;
  EXPECT_EQ(render_table({table_row(r)}),
            "Model\tEcon. (Before)\tSoc. (Before)\tEcon. (After)\tSoc. (After)\n"
            "m\t0.25\t-0.5\t0.0\t0.125\n");
}
