// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

#include "oracles.hpp"
#include "steerkit/io.hpp"
#include "steerkit/isv.hpp"
#include "steerkit/sve.hpp"

using namespace steer;
using io::Bytes;

namespace {

// Independent little-endian writer for expected byte strings.
struct Le {
  Bytes b;
  Le& raw(const char* s) {
    b.insert(b.end(), s, s + std::strlen(s));
    return *this;
  }
  Le& u8(std::uint8_t x) {
    b.push_back(x);
    return *this;
  }
  Le& u32(std::uint32_t x) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
    return *this;
  }
  Le& u64(std::uint64_t x) {
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
    return *this;
  }
  Le& f32(float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    return u32(u);
  }
  Le& f64(double f) {
    std::uint64_t u;
    std::memcpy(&u, &f, 8);
    return u64(u);
  }
};

ActivationSet small_acts() {
  MatrixXd l2(2, 3), l5(2, 3);
  l2 << 1.5, -2, 0.25, 3, 4, 5;
  l5 << -0.5, 0, 1, 2, 8, -16;
  return ActivationSet::from_layers("toy-α", {2, 5}, {7, 9}, {Stance::kPositive, Stance::kNegative},
                                    {l2, l5});
}

SteeringVector trained_vector() {
  return train_isv(fixtures::make_clusters(6, 20, 3.0, 4).acts, 1, BiasAxis::kSocial);
}

SteeringVector ensemble_vector() {
  std::vector<SteeringVector> members;
  for (int layer : {3, 1}) {
    auto c = fixtures::make_clusters(6, 20, 3.0, 10 + static_cast<std::uint64_t>(layer));
    auto v = train_isv(c.acts, 1, BiasAxis::kSocial);
    v.layer_id = layer;
    members.push_back(v);
  }
  return build_sve(members).vector;
}

template <typename Decode>
void expect_every_prefix_is_eof(const Bytes& full, Decode decode) {
  for (std::size_t n = 0; n < full.size(); ++n) {
    const Bytes prefix(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(n));
    try {
      decode(prefix);
      ADD_FAILURE() << "prefix of " << n << " bytes decoded";
    } catch (const UnexpectedEof& e) {
      EXPECT_NE(std::string(e.what()).find("byte offset"), std::string::npos) << e.what();
    } catch (const std::exception& e) {
      ADD_FAILURE() << "prefix " << n << ": " << e.what();
    }
  }
}

template <typename Decode>
void mutation_fuzz(const Bytes& seed_bytes, Decode decode, std::uint64_t seed, int cases) {
  Xoshiro256 rng(seed);
  for (int t = 0; t < cases; ++t) {
    Bytes b = seed_bytes;
    const int edits = 1 + static_cast<int>(rng.below(4));
    for (int e = 0; e < edits; ++e) {
      switch (rng.below(4)) {
        case 0:
          if (!b.empty()) b[rng.below(b.size())] ^= static_cast<std::uint8_t>(1u << rng.below(8));
          break;
        case 1:
          if (!b.empty()) b[rng.below(b.size())] = static_cast<std::uint8_t>(rng.below(256));
          break;
        case 2:
          b.resize(rng.below(b.size() + 1));
          break;
        default:
          b.insert(b.begin() + static_cast<std::ptrdiff_t>(rng.below(b.size() + 1)),
                   static_cast<std::uint8_t>(rng.below(256)));
      }
    }
    try {
      decode(b);
    } catch (const Error&) {
    } catch (const std::exception& e) {
      ADD_FAILURE() << "case " << t << " threw non-library exception: " << e.what();
    }
  }
}

}  // namespace

TEST(Actv, CanonicalBytes) {
  MatrixXd m(1, 1);
  m << 1.5;
  const auto acts = ActivationSet::from_layers("m", {2}, {7}, {Stance::kNegative}, {m});
  Le e;
  e.raw("ACTV").u32(1).u32(1).raw("m").u32(1).u32(2).u32(1).u64(1).u64(7).u8(0).f32(1.5f);
  EXPECT_EQ(io::encode_actv(acts), e.b);
  EXPECT_EQ(io::decode_actv(e.b), acts);
}

TEST(Actv, RoundTrip) {
  const auto acts = small_acts();
  const Bytes b = io::encode_actv(acts);
  EXPECT_EQ(io::decode_actv(b), acts);
  EXPECT_EQ(io::encode_actv(io::decode_actv(b)), b);
}

TEST(Actv, Float32Rounding) {
  MatrixXd m(1, 1);
  m << 0.1;
  const auto acts = ActivationSet::from_layers("m", {1}, {0}, {Stance::kPositive}, {m});
  EXPECT_EQ(io::decode_actv(io::encode_actv(acts)).layer(1)(0, 0), static_cast<double>(0.1f));
}

TEST(Actv, Errors) {
  const Bytes good = io::encode_actv(small_acts());
  expect_every_prefix_is_eof(good, [](const Bytes& b) { return io::decode_actv(b); });
  Bytes bad = good;
  bad[0] = 'X';
  EXPECT_THROW(io::decode_actv(bad), FormatError);
  bad = good;
  bad[4] = 2;
  EXPECT_THROW(io::decode_actv(bad), FormatError);
  bad = good;
  bad.push_back(0);
  EXPECT_THROW(io::decode_actv(bad), FormatError);
  // First float of row 0 set to NaN.
  bad = good;
  const std::size_t header = 4 + 4 + 4 + std::strlen("toy-α") + 4 + 8 + 4 + 8;
  const std::size_t first_float = header + 8 + 1;
  bad[first_float + 0] = 0x00;
  bad[first_float + 1] = 0x00;
  bad[first_float + 2] = 0xC0;
  bad[first_float + 3] = 0x7F;
  EXPECT_THROW(io::decode_actv(bad), InvalidValue);
  bad = good;
  bad[header + 8] = 2;  // stance byte
  EXPECT_THROW(io::decode_actv(bad), FormatError);
  // Row count so large the size computation overflows.
  bad = good;
  for (int i = 0; i < 8; ++i) bad[header - 8 + i] = 0xFF;
  EXPECT_THROW(io::decode_actv(bad), FormatError);
}

TEST(Actv, MutationFuzzOnlyLibraryErrors) {
  mutation_fuzz(io::encode_actv(small_acts()), [](const Bytes& b) { return io::decode_actv(b); }, 1, 1000);
}

TEST(Svec, CanonicalBytes) {
  SteeringVector v;
  v.direction = Eigen::Vector2d(0.6, 0.8);
  v.layer_id = 3;
  v.axis = BiasAxis::kSocial;
  v.method = VectorMethod::kMeanDiff;
  v.quality = {1.0, 2.0, 1.0, -1.0, 1.0, 1.0};
  v.sign_corrected = true;
  Le e;
  e.raw("SVEC").u32(1).u8(1).u8(1).u8(8).u8(0).u32(2).raw("en").u32(3).u32(2).f64(0.6).f64(0.8);
  for (double x : {1.0, 2.0, 1.0, -1.0, 1.0, 1.0}) e.f64(x);
  EXPECT_EQ(io::encode_svec(v), e.b);
  EXPECT_EQ(io::decode_svec(e.b), v);
}

TEST(Svec, RoundTrip) {
  for (const SteeringVector& v : {trained_vector(), ensemble_vector()}) {
    const Bytes b = io::encode_svec(v);
    EXPECT_EQ(io::decode_svec(b), v);
    EXPECT_EQ(io::encode_svec(io::decode_svec(b)), b);
  }
  SteeringVector nc = trained_vector();
  nc.converged = false;
  nc.language = LanguageTag("ur");
  EXPECT_EQ(io::decode_svec(io::encode_svec(nc)), nc);
}

TEST(Svec, Errors) {
  const Bytes good = io::encode_svec(trained_vector());
  expect_every_prefix_is_eof(good, [](const Bytes& b) { return io::decode_svec(b); });
  expect_every_prefix_is_eof(io::encode_svec(ensemble_vector()),
                             [](const Bytes& b) { return io::decode_svec(b); });

  SteeringVector half;
  half.direction = Eigen::Vector2d(0.5, 0.0);
  half.layer_id = 1;
  EXPECT_THROW(io::decode_svec(io::encode_svec(half)), FormatError);

  Bytes bad = good;
  bad[1] = 'x';
  EXPECT_THROW(io::decode_svec(bad), FormatError);
  bad = good;
  bad[8] = 7;  // method
  EXPECT_THROW(io::decode_svec(bad), FormatError);
  bad = good;
  bad[9] = 2;  // axis
  EXPECT_THROW(io::decode_svec(bad), FormatError);
  bad = good;
  bad[10] |= 0x80;  // flags
  EXPECT_THROW(io::decode_svec(bad), FormatError);
  bad = good;
  bad.push_back(1);
  EXPECT_THROW(io::decode_svec(bad), FormatError);

  SteeringVector inconsistent = trained_vector();
  inconsistent.layer_id.reset();
  EXPECT_THROW(io::encode_svec(inconsistent), FormatError);
}

TEST(Svec, MutationFuzzOnlyLibraryErrors) {
  mutation_fuzz(io::encode_svec(trained_vector()), [](const Bytes& b) { return io::decode_svec(b); }, 2, 1000);
  mutation_fuzz(io::encode_svec(ensemble_vector()), [](const Bytes& b) { return io::decode_svec(b); }, 3, 1000);
}

TEST(Files, RoundTripThroughDisk) {
  const auto dir = std::filesystem::temp_directory_path() / "steerkit_io_test";
  std::filesystem::remove_all(dir);
  io::write_actv(dir / "a.actv", small_acts());
  EXPECT_EQ(io::read_actv(dir / "a.actv"), small_acts());
  const auto v = trained_vector();
  io::write_svec(dir / "sub" / "v.svec", v);
  EXPECT_EQ(io::read_svec(dir / "sub" / "v.svec"), v);
  EXPECT_THROW(io::read_file_bytes(dir / "missing"), IoError);
  std::filesystem::remove_all(dir);
}

TEST(Escape, RoundTrip) {
  for (const std::string s : {"", "plain", "tab\there", "a\\b", "line\nbreak\r", "\\t literal",
                              "مساوات\t۔"}) {
    const std::string e = io::escape_field(s);
    EXPECT_EQ(e.find('\t'), std::string::npos);
    EXPECT_EQ(e.find('\n'), std::string::npos);
    EXPECT_EQ(io::unescape_field(e), s);
  }
  EXPECT_EQ(io::escape_field("a\tb\\"), "a\\tb\\\\");
  EXPECT_THROW(io::unescape_field("bad\\q"), FormatError);
  EXPECT_THROW(io::unescape_field("trailing\\"), FormatError);
}

TEST(Embeddings, RoundTrip) {
  std::vector<CandidatePrompt> c{
      {1, Stance::kPositive, "economy", "Taxes\tshould rise", Eigen::Vector3d(0.1, -2.5, 1e-7)},
      {1, Stance::kNegative, "economy", "Taxes should fall", Eigen::Vector3d(1.0 / 3.0, 0, 4)},
      {2, Stance::kPositive, "سماج", "خاندان\nاقدار", Eigen::Vector3d(-0.0, 5e300, -1)}};
  const std::string t = io::encode_embeddings(c);
  EXPECT_EQ(t.rfind("EMB1 3\n", 0), 0u);
  const auto back = io::decode_embeddings(t);
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(back[i].statement_id, c[i].statement_id);
    EXPECT_EQ(back[i].stance, c[i].stance);
    EXPECT_EQ(back[i].category, c[i].category);
    EXPECT_EQ(back[i].text, c[i].text);
    EXPECT_EQ(back[i].embedding, c[i].embedding);
  }
  EXPECT_EQ(io::encode_embeddings(back), t);
}

TEST(Embeddings, Errors) {
  EXPECT_THROW(io::decode_embeddings(""), FormatError);
  EXPECT_THROW(io::decode_embeddings("EMB2 3\n"), FormatError);
  EXPECT_THROW(io::decode_embeddings("EMB1 2\n1\t+\tc\ttext\t1 2 3\n"), FormatError);
  EXPECT_THROW(io::decode_embeddings("EMB1 2\n1\t?\tc\ttext\t1 2\n"), FormatError);
  EXPECT_THROW(io::decode_embeddings("EMB1 2\n1\t+\tc\ttext\n"), FormatError);
  EXPECT_THROW(io::decode_embeddings("EMB1 2\n1\t+\tc\ttext\t1 nan\n"), InvalidValue);
  try {
    io::decode_embeddings("EMB1 1\n1\t+\tc\tt\t1\n2\t-\tc\tt\tx\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Lexicon, RoundTripAndBundledFilesCanonical) {
  const auto lex = default_lexicon(BiasAxis::kEconomic);
  const std::string t = io::encode_lexicon(lex);
  EXPECT_EQ(io::decode_lexicon(t), lex);
  EXPECT_EQ(io::encode_lexicon(io::decode_lexicon(t)), t);
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(STEERKIT_TEST_DATA_DIR "/lexicons")) {
    const std::string text = io::read_file_text(entry.path());
    const auto decoded = io::decode_lexicon(text);
    EXPECT_EQ(io::encode_lexicon(decoded), text) << entry.path();
    const std::string stem = entry.path().stem().string();
    EXPECT_EQ(stem, decoded.language.code() + "_" + std::string(to_string(decoded.axis)));
    ++files;
  }
  EXPECT_EQ(files, 6);
}

TEST(Lexicon, Errors) {
  EXPECT_THROW(io::decode_lexicon("{"), FormatError);
  EXPECT_THROW(io::decode_lexicon(R"({"format":"LEX2"})"), FormatError);
  EXPECT_THROW(io::decode_lexicon(R"({"axis":"social"})"), FormatError);
  EXPECT_THROW(io::decode_lexicon(
                   R"({"format":"LEX1","axis":"social","language":"en","positive":[],"negative":["a"]})"),
               InvalidValue);
}

TEST(Report, RoundTripIsStable) {
  std::vector<ResponsePairInput> in{
      {"1", "equality matters for workers rights", "growth", {{1, 0, 0, 0}}, {{0, 1, 1, 0}}},
      {"2", "tradition", "free market ✓", {}, {}, true, false}};
  ReportOptions opts;
  opts.permutations = 50;
  opts.language = LanguageTag("pa");
  opts.alpha = 1.5;
  const auto rep = aggregate_report(in, default_lexicon(BiasAxis::kEconomic),
                                    default_lexicon(BiasAxis::kSocial), opts);
  const std::string t = io::encode_report(rep);
  const auto back = io::decode_report(t);
  EXPECT_EQ(io::encode_report(back), t);
  EXPECT_EQ(back.model_id, rep.model_id);
  EXPECT_EQ(back.language, rep.language);
  EXPECT_EQ(back.alpha, 1.5);
  EXPECT_EQ(back.economic.bias_before, rep.economic.bias_before);
  EXPECT_EQ(back.social.p_value, rep.social.p_value);
  EXPECT_EQ(back.stance_after, rep.stance_after);
  ASSERT_EQ(back.items.size(), 2u);
  EXPECT_EQ(back.items[1].steered.economic, rep.items[1].steered.economic);
  EXPECT_THROW(io::decode_report(R"({"format":"REPORT1"})"), FormatError);
}

TEST(Responses, RoundTrip) {
  io::ResponseSet s;
  s.model_id = "m";
  s.language = LanguageTag("ur");
  s.alpha = 0.5;
  s.items = {{"a", "x y", "z", {{0.1, 0.2, 0.3, 0.4}}, {}, true, {}},
             {"b", "", "tab\tand\nnewline", {}, {{1, 0, 0, 0}}, {}, false}};
  const std::string t = io::encode_responses(s);
  const auto back = io::decode_responses(t);
  EXPECT_EQ(io::encode_responses(back), t);
  EXPECT_EQ(back.items[1].steered, s.items[1].steered);
  EXPECT_EQ(back.items[0].stance_baseline, s.items[0].stance_baseline);
  EXPECT_EQ(back.items[1].coherent_steered, std::optional<bool>(false));
  EXPECT_FALSE(back.items[0].coherent_steered.has_value());
  EXPECT_THROW(io::decode_responses("[]"), FormatError);
}

TEST(Generations, RoundTripRederivesText) {
  io::GenerationSet g;
  g.method = "isv";
  g.alpha = 1.0;
  g.layers = {3};
  g.items = {{0, "ab", {104, 105, 0xFF}, "ignored"}};
  const std::string t = io::encode_generations(g);
  const auto back = io::decode_generations(t);
  ASSERT_EQ(back.items.size(), 1u);
  EXPECT_EQ(back.items[0].tokens, g.items[0].tokens);
  EXPECT_EQ(back.items[0].text, "hi\xEF\xBF\xBD");
  EXPECT_EQ(io::encode_generations(back), io::encode_generations(io::decode_generations(
                                             io::encode_generations(back))));
  EXPECT_EQ(t.find("ignored"), std::string::npos);
  EXPECT_THROW(io::decode_generations(
                   R"({"format":"GEN1","model_id":"toy","method":"none","alpha":0.0,"layers":[],)"
                   R"("items":[{"id":0,"prompt":"","tokens":[300]}]})"),
               Error);
}

TEST(Prompts, RoundTripAndPairs) {
  std::vector<io::PromptRecord> p{{0, Stance::kPositive, "Wealth\tshould"}, {5, Stance::kNegative, "x\\y"}};
  const std::string t = io::encode_prompts(p);
  const auto back = io::decode_prompts(t);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].text, p[0].text);
  EXPECT_EQ(back[1].id, 5u);
  EXPECT_EQ(back[1].stance, Stance::kNegative);
  EXPECT_EQ(io::encode_prompts(back), t);

  ContrastivePair cp;
  cp.positive = {1, Stance::kPositive, "econ", "pos text", Eigen::Vector2d(1, 0)};
  cp.negative = {2, Stance::kNegative, "econ", "neg\ttext", Eigen::Vector2d(0, 1)};
  cp.category = "econ";
  const auto from_tsv = io::decode_pairs_as_prompts(io::encode_pairs({cp, cp}));
  const auto direct = io::prompts_from_pairs({cp, cp});
  ASSERT_EQ(from_tsv.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(from_tsv[i].id, i);
    EXPECT_EQ(from_tsv[i].id, direct[i].id);
    EXPECT_EQ(from_tsv[i].text, direct[i].text);
    EXPECT_EQ(from_tsv[i].stance, i % 2 == 0 ? Stance::kPositive : Stance::kNegative);
  }
  EXPECT_EQ(from_tsv[3].text, "neg\ttext");
  EXPECT_THROW(io::decode_prompts("PROMPTS1\n1\t+\n"), FormatError);
  EXPECT_THROW(io::decode_prompts("nope\n"), FormatError);
}

TEST(TextFormats, GarbageOnlyLibraryErrors) {
  Xoshiro256 rng(99);
  const std::vector<std::string> seeds{
      io::encode_lexicon(default_lexicon(BiasAxis::kSocial)),
      io::encode_prompts({{0, Stance::kPositive, "a"}}),
      io::encode_embeddings({{1, Stance::kPositive, "c", "t", Eigen::Vector2d(1, 2)}})};
  for (int t = 0; t < 1000; ++t) {
    std::string s = seeds[rng.below(seeds.size())];
    for (int e = 0; e < 3; ++e) {
      if (s.empty()) break;
      s[rng.below(s.size())] = static_cast<char>(rng.below(256));
    }
    for (auto decode : {+[](std::string_view x) { (void)io::decode_lexicon(x); },
                        +[](std::string_view x) { (void)io::decode_prompts(x); },
                        +[](std::string_view x) { (void)io::decode_embeddings(x); },
                        +[](std::string_view x) { (void)io::decode_report(x); },
                        +[](std::string_view x) { (void)io::decode_generations(x); },
                        +[](std::string_view x) { (void)io::decode_responses(x); }}) {
      try {
        decode(s);
      } catch (const Error&) {
      } catch (const std::exception& ex) {
        ADD_FAILURE() << ex.what();
      }
    }
  }
}
