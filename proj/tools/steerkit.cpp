// SPDX-License-Identifier: Apache-2.0
//
// steerkit command-line driver. Data goes to files (or stdout where noted);
// the resolved configuration and diagnostics go to stderr.

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "steerkit/io.hpp"
#include "steerkit/isv.hpp"
#include "steerkit/pairgen.hpp"
#include "steerkit/pipeline.hpp"
#include "steerkit/plot.hpp"
#include "steerkit/rng.hpp"
#include "steerkit/sve.hpp"
#include "steerkit/toytask.hpp"

namespace fs = std::filesystem;
using namespace steer;

namespace {

fs::path data_dir() {
  if (const char* env = std::getenv("STEERKIT_DATA_DIR"); env && *env) return env;
  return STEERKIT_DEFAULT_DATA_DIR;
}

struct ModelOptions {
  std::string model = "toy";
};

ToyModelState make_model(const std::string& kind, std::uint64_t seed) {
  if (kind == "toy") {
    ToyModelConfig c;
    c.seed = seed;
    return init_model(c);
  }
  ToyTaskConfig c;
  c.model.seed = seed;
  return build_toy_task(c).model;
}

struct GenOptions {
  double temperature = 0.5;
  int max_new_tokens = 100;
  bool greedy = false;

  GenerationConfig config() const {
    GenerationConfig g;
    g.temperature = temperature;
    g.max_new_tokens = max_new_tokens;
    g.greedy = greedy;
    return g;
  }
};

void add_gen_options(CLI::App* sub, GenOptions& g) {
  sub->add_option("--temperature", g.temperature, "Sampling temperature")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--max-new-tokens", g.max_new_tokens, "Tokens to generate")
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();
  sub->add_flag("--greedy", g.greedy, "Argmax decoding");
}

struct SteerOptions {
  std::string vector;
  double alpha = 1.0;
  bool alpha_total = false;
  std::string scope = "last";
  std::vector<int> inject_layers;

  PlanOptions plan() const {
    PlanOptions p;
    p.alpha = alpha;
    p.alpha_total = alpha_total;
    p.scope = scope == "all" ? InjectionScope::kAllPositions : InjectionScope::kLastToken;
    p.layers = inject_layers;
    return p;
  }
};

void add_steer_options(CLI::App* sub, SteerOptions& s, bool with_vector = true) {
  if (with_vector) sub->add_option("--vector", s.vector, "SVEC1 steering vector");
  sub->add_option("--alpha", s.alpha, "Steering strength")->capture_default_str();
  sub->add_flag("--alpha-total", s.alpha_total,
                "Ensembles: split alpha evenly across the injected layers");
  sub->add_option("--scope", s.scope, "Injection positions: last (decoded token) or all")
      ->check(CLI::IsMember({"last", "all"}))
      ->capture_default_str();
  sub->add_option("--inject-layers", s.inject_layers,
                  "Ensembles: layers to inject at (default: member layers)")
      ->delimiter(',');
}

std::vector<io::PromptRecord> read_prompt_file(const fs::path& path) {
  const std::string text = io::read_file_text(path);
  if (text.rfind("PAIRS1", 0) == 0) return io::decode_pairs_as_prompts(text);
  return io::decode_prompts(text);
}

BiasLexicon load_lexicon(const std::string& path, BiasAxis axis, const LanguageTag& lang,
                         const std::string& model) {
  if (!path.empty()) {
    BiasLexicon lex = io::decode_lexicon(io::read_file_text(path));
    if (lex.axis != axis) {
      throw AxisMismatch("lexicon " + path + " is for axis " + std::string(to_string(lex.axis)));
    }
    return lex;
  }
  if (model == "toy-task") return toy_lexicon(axis);
  const fs::path p =
      data_dir() / "lexicons" / (lang.code() + "_" + std::string(to_string(axis)) + ".json");
  if (fs::exists(p)) return io::decode_lexicon(io::read_file_text(p));
  if (lang.code() == "en") return default_lexicon(axis);
  throw IoError("no lexicon for language '" + lang.code() + "' (looked for " + p.string() + ")");
}

std::vector<double> alpha_grid(const std::vector<double>& explicit_alphas, double lo, double hi,
                               double step) {
  if (!explicit_alphas.empty()) return explicit_alphas;
  if (!(step > 0.0) || hi < lo) throw ConfigError("alpha range needs step > 0 and max >= min");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

void print_sweep(std::ostream& os, const std::vector<SweepPoint>& pts) {
  os << render_plot_tsv(alpha_sweep_table(pts));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steering-vector toolkit: probes, ensembles, injection and bias evaluation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML/INI file (flags take precedence)");
  std::uint64_t seed = 42;
  app.add_option("--seed", seed, "Root seed; every random choice derives from it")
      ->capture_default_str();

  // pairs
  auto* pairs = app.add_subcommand("pairs", "Build contrastive pairs from an EMB1 file");
  std::string emb_path, pairs_out, prompts_out;
  PairGenConfig pg;
  pairs->add_option("--embeddings", emb_path, "EMB1 candidates")->required();
  pairs->add_option("--out", pairs_out, "PAIRS1 output")->required();
  pairs->add_option("--prompts-out", prompts_out, "Also write PROMPTS1 (ids 2k / 2k+1)");
  pairs->add_option("--tau", pg.tau, "Keep pairs with cosine below tau")
      ->check(CLI::Range(-1.0, 1.0))
      ->capture_default_str();
  pairs->add_option("--max-per-category", pg.max_pairs_per_category)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  pairs->add_option("--max-comparisons", pg.max_comparisons)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // extract
  auto* extract = app.add_subcommand("extract", "Last-token activations from the toy model");
  ModelOptions ex_model;
  std::string ex_prompts, ex_out;
  std::vector<int> ex_layers = kToyDefaultLayers;
  std::size_t ex_pairs = 32, ex_len = 12;
  extract->add_option("--model", ex_model.model, "toy (seeded) or toy-task (planted lexicon)")
      ->check(CLI::IsMember({"toy", "toy-task"}))
      ->capture_default_str();
  extract->add_option("--prompts", ex_prompts, "PROMPTS1 or PAIRS1 file");
  extract->add_option("--toy-pairs", ex_pairs, "Without --prompts: generated '+'/'-' pairs")
      ->capture_default_str();
  extract->add_option("--prompt-length", ex_len)->capture_default_str();
  extract->add_option("--layers", ex_layers)->delimiter(',')->capture_default_str();
  extract->add_option("--out", ex_out, "ACTV1 output")->required();

  // import-activations
  auto* import = app.add_subcommand("import-activations", "Validate (and subset) an ACTV1 file");
  std::string im_in, im_out;
  std::vector<int> im_layers;
  import->add_option("--in", im_in)->required();
  import->add_option("--out", im_out, "Canonical re-encoding");
  import->add_option("--layers", im_layers, "Keep only these layers")->delimiter(',');

  // train-isv
  auto* train = app.add_subcommand("train-isv", "Per-layer probe steering vectors");
  std::string tr_acts, tr_out, tr_out_dir, tr_axis = "economic", tr_lang = "en",
                                           tr_method = "logreg";
  std::vector<int> tr_layers;
  LogRegConfig lr;
  train->add_option("--acts", tr_acts, "ACTV1 input")->required();
  train->add_option("--layers", tr_layers, "Layers to train (default: 8,12,16,20,24 when an external file has them, else all)")
      ->delimiter(',');
  train->add_option("--axis", tr_axis)
      ->check(CLI::IsMember({"economic", "social"}))
      ->capture_default_str();
  train->add_option("--lang", tr_lang)->capture_default_str();
  train->add_option("--method", tr_method)
      ->check(CLI::IsMember({"logreg", "isv", "meandiff"}))
      ->capture_default_str();
  train->add_option("--max-iter", lr.max_iter)->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--l2", lr.l2_strength, "Inverse regularization strength C")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--tol", lr.tol)->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--out", tr_out, "SVEC1 output (single layer)");
  train->add_option("--out-dir", tr_out_dir, "One layer<L>.svec per layer");

  // build-sve
  auto* sve = app.add_subcommand("build-sve", "Quality-weighted ensemble of SVEC1 files");
  std::vector<std::string> sve_in;
  std::string sve_out;
  sve->add_option("--vectors", sve_in)->required()->expected(1, -1);
  sve->add_option("--out", sve_out)->required();

  // generate
  auto* gen = app.add_subcommand("generate", "Toy-model generation, optionally steered");
  ModelOptions gen_model;
  GenOptions gen_opts;
  SteerOptions gen_steer;
  std::vector<std::string> gen_texts;
  std::string gen_prompts, gen_out;
  std::size_t gen_neutral = 0;
  gen->add_option("--model", gen_model.model)
      ->check(CLI::IsMember({"toy", "toy-task"}))
      ->capture_default_str();
  gen->add_option("--prompt", gen_texts, "Prompt text (repeatable)");
  gen->add_option("--prompts", gen_prompts, "PROMPTS1 or PAIRS1 file");
  gen->add_option("--toy-prompts", gen_neutral, "Generate this many neutral prompts");
  add_gen_options(gen, gen_opts);
  add_steer_options(gen, gen_steer);
  gen->add_option("--out", gen_out, "GEN1 output (default stdout)");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Bias / quality / stance report");
  std::string ev_resp, ev_base, ev_steer, ev_out, ev_lex_econ, ev_lex_soc, ev_lang = "en",
                                                                      ev_model;
  ReportOptions ev_opts;
  eval->add_option("--responses", ev_resp, "RESP1 response pairs");
  eval->add_option("--baseline", ev_base, "GEN1 baseline generations");
  eval->add_option("--steered", ev_steer, "GEN1 steered generations");
  eval->add_option("--lang", ev_lang)->capture_default_str();
  eval->add_option("--lexicon-econ", ev_lex_econ, "LEX1 economic lexicon");
  eval->add_option("--lexicon-soc", ev_lex_soc, "LEX1 social lexicon");
  eval->add_option("--lexicon-model", ev_model,
                   "Use the built-in lexicons of a model (toy-task)")
      ->check(CLI::IsMember({"toy-task"}));
  eval->add_flag("--combine-stance", ev_opts.combine_stance,
                 "Average keyword bias with stance/10 per response");
  eval->add_option("--permutations", ev_opts.permutations, "Sign-flip draws (0 disables)")
      ->capture_default_str();
  eval->add_option("--out", ev_out, "REPORT1 output (default stdout)");

  // sweep-alpha
  auto* sweep = app.add_subcommand("sweep-alpha", "Delta bias as a function of alpha (toy)");
  ModelOptions sw_model{"toy-task"};
  GenOptions sw_gen;
  SteerOptions sw_steer;
  std::vector<double> sw_alphas;
  double sw_min = 0.0, sw_max = 2.0, sw_step = 0.5;
  std::string sw_method = "isv", sw_stem, sw_tradeoff, sw_axis = "economic";
  int sw_layer = 3;
  std::vector<int> sw_layers = kToyDefaultLayers;
  std::size_t sw_prompts = 32, sw_pairs = 32, sw_perm = 0;
  sweep->add_option("--model", sw_model.model)
      ->check(CLI::IsMember({"toy", "toy-task"}))
      ->capture_default_str();
  sweep->add_option("--vector", sw_steer.vector, "SVEC1 vector (default: train one)");
  sweep->add_option("--method", sw_method, "Vector to train without --vector")
      ->check(CLI::IsMember({"isv", "logreg", "meandiff", "sve"}))
      ->capture_default_str();
  sweep->add_option("--axis", sw_axis)
      ->check(CLI::IsMember({"economic", "social"}))
      ->capture_default_str();
  sweep->add_option("--train-layer", sw_layer, "Layer for isv/meandiff")->capture_default_str();
  sweep->add_option("--layers", sw_layers, "Layers for sve")->delimiter(',')->capture_default_str();
  sweep->add_option("--alphas", sw_alphas, "Explicit alpha list")->delimiter(',');
  sweep->add_option("--alpha-min", sw_min)->capture_default_str();
  sweep->add_option("--alpha-max", sw_max)->capture_default_str();
  sweep->add_option("--alpha-step", sw_step)->capture_default_str();
  sweep->add_option("--n-prompts", sw_prompts)->check(CLI::PositiveNumber)->capture_default_str();
  sweep->add_option("--train-pairs", sw_pairs)->check(CLI::PositiveNumber)->capture_default_str();
  sweep->add_option("--permutations", sw_perm, "Sign-flip draws per point")->capture_default_str();
  sweep->add_flag("--alpha-total", sw_steer.alpha_total, "Ensembles: split alpha across layers");
  sweep->add_option("--scope", sw_steer.scope)
      ->check(CLI::IsMember({"last", "all"}))
      ->capture_default_str();
  add_gen_options(sweep, sw_gen);
  sweep->add_option("--out-stem", sw_stem, "Writes <stem>.tsv and <stem>.svg")->required();
  sweep->add_option("--tradeoff-stem", sw_tradeoff, "Also emit the quality tradeoff plot");

  // layer-profile
  auto* profile = app.add_subcommand("layer-profile", "Per-layer similarity / effectiveness");
  std::string lp_acts, lp_stem, lp_eff_stem, lp_axis = "economic";
  ModelOptions lp_model{"toy-task"};
  GenOptions lp_gen;
  double lp_alpha = 1.0;
  std::size_t lp_prompts = 32;
  profile->add_option("--acts", lp_acts, "ACTV1 input")->required();
  profile->add_option("--out-stem", lp_stem, "Similarity profile <stem>.tsv/.svg")->required();
  profile->add_option("--effectiveness-stem", lp_eff_stem,
                      "Also steer the toy model per layer and plot delta bias");
  profile->add_option("--model", lp_model.model)
      ->check(CLI::IsMember({"toy", "toy-task"}))
      ->capture_default_str();
  profile->add_option("--axis", lp_axis)
      ->check(CLI::IsMember({"economic", "social"}))
      ->capture_default_str();
  profile->add_option("--alpha", lp_alpha)->capture_default_str();
  profile->add_option("--n-prompts", lp_prompts)->check(CLI::PositiveNumber)->capture_default_str();
  add_gen_options(profile, lp_gen);

  // report
  auto* report = app.add_subcommand("report", "Before/after table from REPORT1 files");
  std::vector<std::string> rp_in, rp_rows;
  std::string rp_out, rp_score = "bias";
  report->add_option("--in", rp_in, "REPORT1 files");
  report->add_option("--row", rp_rows, "Literal row: model,econ_before,soc_before,econ_after,soc_after");
  report->add_option("--score", rp_score, "bias (keyword) or stance")
      ->check(CLI::IsMember({"bias", "stance"}))
      ->capture_default_str();
  report->add_option("--out", rp_out, "TSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: kind=Usage msg=" << e.what() << "\n";
    return 2;
  }

  for (const auto* sub : app.get_subcommands()) {
    std::cerr << "# resolved config\nseed=" << seed << "\n[" << sub->get_name() << "]\n"
              << sub->config_to_str(true, false);
  }

  try {
    if (pairs->parsed()) {
      const auto candidates = io::decode_embeddings(io::read_file_text(emb_path));
      const PairGenResult res = build_pairs(candidates, pg);
      for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
      io::write_file(pairs_out, io::encode_pairs(res.pairs));
      if (!prompts_out.empty()) {
        io::write_file(prompts_out, io::encode_prompts(io::prompts_from_pairs(res.pairs)));
      }
      const PairStats st = pair_stats(res.pairs);
      std::cerr << "pairs=" << st.count << " comparisons=" << res.comparisons << "\n";
      for (const auto& [cat, n] : st.count_per_category) std::cout << cat << '\t' << n << '\n';
    } else if (extract->parsed()) {
      const ToyModelState model = make_model(ex_model.model, seed);
      std::vector<LabeledPrompt> prompts;
      if (!ex_prompts.empty()) {
        for (const auto& p : read_prompt_file(ex_prompts)) {
          prompts.push_back({p.id, p.stance, encode_bytes(p.text)});
        }
      } else {
        prompts = toy_contrastive_prompts(ex_pairs, seed, ex_len);
      }
      const ActivationSet acts = extract_activations(model, prompts, ex_layers, ex_model.model);
      io::write_actv(ex_out, acts);
      std::cerr << "rows=" << acts.rows() << " layers=" << acts.layer_ids().size()
                << " d=" << acts.hidden_dim() << "\n";
    } else if (import->parsed()) {
      ActivationSet acts = io::read_actv(im_in);
      if (!im_layers.empty()) acts = acts.select_layers(im_layers);
      std::cout << "model\t" << acts.model_id() << "\nrows\t" << acts.rows() << "\npositive\t"
                << acts.count(Stance::kPositive) << "\nnegative\t" << acts.count(Stance::kNegative)
                << "\nhidden_dim\t" << acts.hidden_dim() << "\nlayers\t";
      for (std::size_t i = 0; i < acts.layer_ids().size(); ++i) {
        std::cout << (i ? "," : "") << acts.layer_ids()[i];
      }
      std::cout << "\n";
      if (!im_out.empty()) io::write_actv(im_out, acts);
    } else if (train->parsed()) {
      const ActivationSet acts = io::read_actv(tr_acts);
      std::vector<int> layers = tr_layers;
      if (layers.empty()) {
        const bool toy = acts.model_id().rfind("toy", 0) == 0;
        const bool has_external = std::all_of(kExternalDefaultLayers.begin(),
                                              kExternalDefaultLayers.end(),
                                              [&](int l) { return acts.has_layer(l); });
        layers = !toy && has_external ? kExternalDefaultLayers : acts.layer_ids();
      }
      if (layers.size() == 1 && tr_out.empty() && tr_out_dir.empty()) {
        throw ConfigError("train-isv: --out or --out-dir is required");
      }
      if (layers.size() > 1 && tr_out_dir.empty()) {
        throw ConfigError("train-isv: several layers need --out-dir");
      }
      lr.seed = seed;
      const BiasAxis axis = parse_axis(tr_axis);
      const LanguageTag lang(tr_lang);
      std::cout << "layer\tq\taccuracy\tseparation\tconverged\tsign_corrected\n";
      for (int layer : layers) {
        const SteeringVector v = tr_method == "meandiff"
                                     ? train_meandiff(acts, layer, axis, lang)
                                     : train_isv(acts, layer, axis, lr, lang);
        if (!v.converged) std::cerr << "warning: layer " << layer << " did not converge\n";
        const fs::path out = layers.size() == 1 && !tr_out.empty()
                                 ? fs::path(tr_out)
                                 : fs::path(tr_out_dir) / ("layer" + std::to_string(layer) + ".svec");
        io::write_svec(out, v);
        std::cout << layer << '\t' << format_number(v.quality.q) << '\t'
                  << format_number(v.quality.accuracy) << '\t'
                  << format_number(v.quality.separation) << '\t' << (v.converged ? 1 : 0) << '\t'
                  << (v.sign_corrected ? 1 : 0) << '\n';
      }
    } else if (sve->parsed()) {
      std::vector<SteeringVector> members;
      for (const auto& p : sve_in) members.push_back(io::read_svec(p));
      const EnsembleResult res = build_sve(members);
      io::write_svec(sve_out, res.vector);
      std::cout << "layer\tweight\tq\n";
      for (const auto& r : ensemble_report(res.spec)) {
        std::cout << r.layer_id << '\t' << format_number(r.weight) << '\t' << format_number(r.q)
                  << '\n';
      }
    } else if (gen->parsed()) {
      const ToyModelState model = make_model(gen_model.model, seed);
      std::vector<std::string> texts = gen_texts;
      if (!gen_prompts.empty()) {
        for (const auto& p : read_prompt_file(gen_prompts)) texts.push_back(p.text);
      }
      std::vector<std::vector<int>> prompts;
      for (const auto& t : texts) prompts.push_back(encode_bytes(t));
      for (auto& p : toy_neutral_prompts(gen_neutral, seed)) {
        texts.push_back(decode_bytes(p));
        prompts.push_back(std::move(p));
      }
      if (prompts.empty()) throw ConfigError("generate: give --prompt, --prompts or --toy-prompts");
      InjectionPlan plan;
      io::GenerationSet set;
      set.model_id = gen_model.model;
      if (!gen_steer.vector.empty()) {
        const SteeringVector v = io::read_svec(gen_steer.vector);
        plan = make_plan(v, gen_steer.plan());
        set.method = std::string(to_string(v.method));
        set.alpha = gen_steer.alpha;
        set.layers = plan.layers();
      }
      const auto results = generate_batch(model, prompts, gen_opts.config(), plan, seed);
      for (std::size_t i = 0; i < results.size(); ++i) {
        set.items.push_back({i, texts[i], results[i].tokens, results[i].text});
      }
      const std::string out = io::encode_generations(set);
      if (gen_out.empty()) {
        std::cout << out;
      } else {
        io::write_file(gen_out, out);
      }
    } else if (eval->parsed()) {
      io::ResponseSet rs;
      if (!ev_resp.empty()) {
        rs = io::decode_responses(io::read_file_text(ev_resp));
      } else if (!ev_base.empty() && !ev_steer.empty()) {
        const auto b = io::decode_generations(io::read_file_text(ev_base));
        const auto s = io::decode_generations(io::read_file_text(ev_steer));
        if (b.items.size() != s.items.size()) {
          throw ShapeError("baseline and steered files hold different item counts");
        }
        rs.model_id = b.model_id;
        rs.method = s.method;
        rs.alpha = s.alpha;
        rs.language = LanguageTag(ev_lang);
        for (std::size_t i = 0; i < b.items.size(); ++i) {
          ResponsePairInput p;
          p.id = std::to_string(b.items[i].id);
          p.baseline = b.items[i].text;
          p.steered = s.items[i].text;
          rs.items.push_back(std::move(p));
        }
      } else {
        throw ConfigError("evaluate: give --responses or both --baseline and --steered");
      }
      const LanguageTag lang =
          eval->count("--lang") ? LanguageTag(ev_lang) : rs.language;
      ev_opts.model_id = rs.model_id;
      ev_opts.language = lang;
      ev_opts.method = rs.method;
      ev_opts.alpha = rs.alpha;
      ev_opts.seed = seed;
      const BiasReport rep = aggregate_report(
          rs.items, load_lexicon(ev_lex_econ, BiasAxis::kEconomic, lang, ev_model),
          load_lexicon(ev_lex_soc, BiasAxis::kSocial, lang, ev_model), ev_opts);
      const std::string out = io::encode_report(rep);
      if (ev_out.empty()) {
        std::cout << out;
      } else {
        io::write_file(ev_out, out);
      }
      std::cerr << "econ delta=" << format_number(rep.economic.delta_bias)
                << " soc delta=" << format_number(rep.social.delta_bias) << "\n";
    } else if (sweep->parsed()) {
      const ToyModelState model = make_model(sw_model.model, seed);
      const BiasAxis axis = parse_axis(sw_axis);
      SteeringVector v;
      if (!sw_steer.vector.empty()) {
        v = io::read_svec(sw_steer.vector);
      } else {
        const auto cp = toy_contrastive_prompts(sw_pairs, seed);
        LogRegConfig cfg;
        cfg.seed = seed;
        if (sw_method == "sve") {
          const ActivationSet acts = extract_activations(model, cp, sw_layers, sw_model.model);
          std::vector<SteeringVector> members;
          for (int l : sw_layers) members.push_back(train_isv(acts, l, axis, cfg));
          v = build_sve(members).vector;
        } else {
          const ActivationSet acts = extract_activations(model, cp, {sw_layer}, sw_model.model);
          v = sw_method == "meandiff" ? train_meandiff(acts, sw_layer, axis)
                                      : train_isv(acts, sw_layer, axis, cfg);
        }
      }
      SweepConfig sc;
      sc.alphas = alpha_grid(sw_alphas, sw_min, sw_max, sw_step);
      sc.gen = sw_gen.config();
      sc.plan = sw_steer.plan();
      sc.seed = seed;
      sc.permutations = sw_perm;
      const auto prompts = toy_neutral_prompts(sw_prompts, seed);
      const auto pts = sweep_alpha(model, prompts, v, load_lexicon("", BiasAxis::kEconomic, {}, sw_model.model),
                                   load_lexicon("", BiasAxis::kSocial, {}, sw_model.model), sc);
      emit_plot_data(alpha_sweep_table(pts), sw_stem);
      if (!sw_tradeoff.empty()) emit_plot_data(quality_tradeoff_table(pts), sw_tradeoff);
      print_sweep(std::cout, pts);
    } else if (profile->parsed()) {
      const ActivationSet acts = io::read_actv(lp_acts);
      const auto prof = layer_similarity_profile(acts);
      emit_plot_data(similarity_profile_table(prof), lp_stem);
      std::cout << render_plot_tsv(similarity_profile_table(prof));
      if (!lp_eff_stem.empty()) {
        const ToyModelState model = make_model(lp_model.model, seed);
        SweepConfig sc;
        sc.gen = lp_gen.config();
        sc.plan.alpha = lp_alpha;
        sc.seed = seed;
        const auto eff = layer_effectiveness(
            model, acts, toy_neutral_prompts(lp_prompts, seed), parse_axis(lp_axis),
            load_lexicon("", BiasAxis::kEconomic, {}, lp_model.model),
            load_lexicon("", BiasAxis::kSocial, {}, lp_model.model), sc);
        emit_plot_data(layer_effectiveness_table(eff), lp_eff_stem);
        std::cout << render_plot_tsv(layer_effectiveness_table(eff));
      }
    } else if (report->parsed()) {
      std::vector<TableRow> rows;
      for (const auto& p : rp_in) {
        const BiasReport rep = io::decode_report(io::read_file_text(p));
        if (rp_score == "stance") {
          if (!rep.stance_before || !rep.stance_after) {
            throw DegenerateInput("report " + p + " has no stance scores");
          }
          // Stance is axis-free; both columns show it.
          rows.push_back({rep.model_id, *rep.stance_before, *rep.stance_before,
                          *rep.stance_after, *rep.stance_after});
        } else {
          rows.push_back(table_row(rep));
        }
      }
      for (const auto& r : rp_rows) {
        std::vector<std::string> f;
        std::stringstream ss(r);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 5) throw ConfigError("--row needs 5 comma-separated fields: " + r);
        TableRow row{f[0], 0, 0, 0, 0};
        double* vals[] = {&row.econ_before, &row.soc_before, &row.econ_after, &row.soc_after};
        for (int i = 0; i < 4; ++i) {
          const std::string& cell = f[static_cast<std::size_t>(i + 1)];
          const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), *vals[i]);
          if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
            throw ConfigError("--row: bad number '" + cell + "'");
          }
        }
        rows.push_back(std::move(row));
      }
      if (rows.empty()) throw ConfigError("report: give --in or --row");
      const std::string table = render_table(rows);
      if (rp_out.empty()) {
        std::cout << table;
      } else {
        io::write_file(rp_out, table);
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: kind=" << error_code_name(e.code()) << " msg=" << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: kind=Internal msg=" << e.what() << "\n";
    return 1;
  }
  return 0;
}
