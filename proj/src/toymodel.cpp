// SPDX-License-Identifier: Apache-2.0

#include "steerkit/toymodel.hpp"

#include <cmath>
#include <cstring>
#include <set>

#include "steerkit/rng.hpp"

namespace steer {

void ToyModelConfig::validate() const {
  if (vocab_size < 1 || d_model < 1 || n_layers < 1 || n_heads < 1 || max_seq < 1) {
    throw ConfigError("toy model: all dimensions must be positive");
  }
  if (d_model % n_heads != 0) {
    throw ConfigError("toy model: d_model " + std::to_string(d_model) +
                      " not divisible by n_heads " + std::to_string(n_heads));
  }
}

std::int64_t ToyModelConfig::parameter_count() const {
  const std::int64_t v = vocab_size, d = d_model, s = max_seq, l = n_layers;
  return 2 * v * d + s * d + v + 2 * d + l * (12 * d * d + 9 * d);
}

namespace {

void fill_uniform(MatrixXd& m, Xoshiro256& rng, double radius) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.symmetric(radius);
  }
}

struct Fnv {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  void add(double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xFF;
      h *= 0x100000001B3ULL;
    }
  }
  template <typename Derived>
  void add(const Eigen::DenseBase<Derived>& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) add(static_cast<double>(m(r, c)));
    }
  }
};

void hash_block(Fnv& f, const ToyBlock& b) {
  f.add(b.ln1_gamma);
  f.add(b.ln1_beta);
  f.add(b.wq);
  f.add(b.wk);
  f.add(b.wv);
  f.add(b.wo);
  f.add(b.ln2_gamma);
  f.add(b.ln2_beta);
  f.add(b.w1);
  f.add(b.b1);
  f.add(b.w2);
  f.add(b.b2);
}

HiddenVector layer_norm(const HiddenVector& x, const HiddenVector& gamma, const HiddenVector& beta) {
  const double mean = x.mean();
  const HiddenVector centered = x.array() - mean;
  const double var = centered.squaredNorm() / static_cast<double>(x.size());
  return (centered / std::sqrt(var + 1e-5)).cwiseProduct(gamma) + beta;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

}  // namespace

std::int64_t ToyModelState::parameter_count() const {
  std::int64_t n = token_embedding.size() + position_embedding.size() + lnf_gamma.size() +
                   lnf_beta.size() + head.size() + head_bias.size();
  for (const auto& b : blocks) {
    n += b.ln1_gamma.size() + b.ln1_beta.size() + b.wq.size() + b.wk.size() + b.wv.size() +
         b.wo.size() + b.ln2_gamma.size() + b.ln2_beta.size() + b.w1.size() + b.b1.size() +
         b.w2.size() + b.b2.size();
  }
  return n;
}

std::uint64_t ToyModelState::checksum() const {
  Fnv f;
  f.add(token_embedding);
  f.add(position_embedding);
  for (const auto& b : blocks) hash_block(f, b);
  f.add(lnf_gamma);
  f.add(lnf_beta);
  f.add(head);
  f.add(head_bias);
  return f.h;
}

std::uint64_t ToyModelState::block_checksum(std::size_t index) const {
  Fnv f;
  hash_block(f, blocks.at(index));
  return f.h;
}

ToyModelState init_model(const ToyModelConfig& config) {
  config.validate();
  const Eigen::Index v = config.vocab_size, d = config.d_model, s = config.max_seq;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  const double inv_sqrt_4d = 1.0 / std::sqrt(static_cast<double>(4 * d));
  const double out_scale = 1.0 / std::sqrt(2.0 * config.n_layers);

  Xoshiro256 rng(config.seed);
  ToyModelState m;
  m.config = config;
  m.token_embedding.resize(v, d);
  fill_uniform(m.token_embedding, rng, 0.3);
  m.position_embedding.resize(s, d);
  fill_uniform(m.position_embedding, rng, 0.05);
  for (int l = 0; l < config.n_layers; ++l) {
    ToyBlock b;
    b.ln1_gamma = HiddenVector::Ones(d);
    b.ln1_beta = HiddenVector::Zero(d);
    b.ln2_gamma = HiddenVector::Ones(d);
    b.ln2_beta = HiddenVector::Zero(d);
    for (MatrixXd* w : {&b.wq, &b.wk, &b.wv, &b.wo}) {
      w->resize(d, d);
      fill_uniform(*w, rng, w == &b.wo ? inv_sqrt_d * out_scale : inv_sqrt_d);
    }
    b.w1.resize(4 * d, d);
    fill_uniform(b.w1, rng, inv_sqrt_d);
    b.b1 = HiddenVector::Zero(4 * d);
    b.w2.resize(d, 4 * d);
    fill_uniform(b.w2, rng, inv_sqrt_4d * out_scale);
    b.b2 = HiddenVector::Zero(d);
    m.blocks.push_back(std::move(b));
  }
  m.lnf_gamma = HiddenVector::Ones(d);
  m.lnf_beta = HiddenVector::Zero(d);
  m.head.resize(v, d);
  fill_uniform(m.head, rng, inv_sqrt_d);
  m.head_bias = HiddenVector::Zero(v);
  return m;
}

std::vector<int> encode_bytes(std::string_view text) {
  std::vector<int> out;
  out.reserve(text.size());
  for (unsigned char c : text) out.push_back(c);
  return out;
}

std::string decode_bytes(const std::vector<int>& tokens) {
  std::string out;
  out.reserve(tokens.size());
  for (int t : tokens) out.push_back(static_cast<char>(static_cast<unsigned char>(t)));
  return out;
}

std::vector<int> InjectionPlan::layers() const {
  std::set<int> s;
  for (const auto& e : entries) s.insert(e.layer_id);
  return {s.begin(), s.end()};
}

void GenerationConfig::validate() const {
  if (max_new_tokens < 1) throw ConfigError("generation: max_new_tokens must be >= 1");
  if (!greedy && !(temperature > 0.0)) {
    throw ConfigError("generation: temperature must be > 0 unless greedy");
  }
}

void validate_plan(const ToyModelState& model, const InjectionPlan& plan) {
  for (const auto& e : plan.entries) {
    if (e.layer_id < 1 || e.layer_id > model.config.n_layers) {
      throw ConfigError("injection layer " + std::to_string(e.layer_id) +
                        " outside 1.." + std::to_string(model.config.n_layers));
    }
    if (e.direction.size() != model.config.d_model) {
      throw ShapeError("injection direction has size " + std::to_string(e.direction.size()) +
                       ", model hidden size is " + std::to_string(model.config.d_model));
    }
    if (std::abs(e.direction.norm() - 1.0) > 1e-6) {
      throw InvalidValue("injection direction is not unit norm");
    }
    if (!std::isfinite(e.alpha)) throw InvalidValue("injection alpha is not finite");
  }
}

ToyDecoder::ToyDecoder(const ToyModelState& model) : model_(model) {
  const auto& c = model.config;
  keys_.assign(static_cast<std::size_t>(c.n_layers), MatrixXd(c.max_seq, c.d_model));
  values_.assign(static_cast<std::size_t>(c.n_layers), MatrixXd(c.max_seq, c.d_model));
}

void ToyDecoder::reset() { length_ = 0; }

Eigen::VectorXd ToyDecoder::step(int token, const InjectionPlan* plan, bool inject,
                                 std::vector<HiddenVector>* layer_outputs) {
  const auto& c = model_.config;
  if (length_ >= c.max_seq) {
    throw SequenceTooLong("sequence exceeds max_seq " + std::to_string(c.max_seq));
  }
  if (token < 0 || token >= c.vocab_size) {
    throw InvalidValue("token " + std::to_string(token) + " outside vocabulary");
  }
  const int pos = length_;
  const int hd = c.d_model / c.n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));

  HiddenVector x = model_.token_embedding.row(token).transpose() +
                   model_.position_embedding.row(pos).transpose();
  if (layer_outputs) layer_outputs->clear();

  for (int l = 0; l < c.n_layers; ++l) {
    const ToyBlock& b = model_.blocks[static_cast<std::size_t>(l)];
    const HiddenVector h = layer_norm(x, b.ln1_gamma, b.ln1_beta);
    const HiddenVector q = b.wq * h;
    keys_[l].row(pos) = (b.wk * h).transpose();
    values_[l].row(pos) = (b.wv * h).transpose();

    HiddenVector attn(c.d_model);
    for (int head = 0; head < c.n_heads; ++head) {
      const auto k_blk = keys_[l].block(0, head * hd, pos + 1, hd);
      const auto v_blk = values_[l].block(0, head * hd, pos + 1, hd);
      Eigen::VectorXd scores = (k_blk * q.segment(head * hd, hd)) * scale;
      const double mx = scores.maxCoeff();
      scores = (scores.array() - mx).exp();
      scores /= scores.sum();
      attn.segment(head * hd, hd) = v_blk.transpose() * scores;
    }
    x += b.wo * attn;

    const HiddenVector h2 = layer_norm(x, b.ln2_gamma, b.ln2_beta);
    Eigen::VectorXd pre = b.w1 * h2 + b.b1;
    for (Eigen::Index i = 0; i < pre.size(); ++i) pre(i) = gelu(pre(i));
    x += b.w2 * pre + b.b2;

    if (inject && plan) {
      for (const auto& e : plan->entries) {
        if (e.layer_id == l + 1) x = apply_injection(x, e.direction, e.alpha);
      }
    }
    if (layer_outputs) layer_outputs->push_back(x);
  }
  ++length_;
  const HiddenVector hf = layer_norm(x, model_.lnf_gamma, model_.lnf_beta);
  return model_.head * hf + model_.head_bias;
}

ActivationSet extract_activations(const ToyModelState& model,
                                  const std::vector<LabeledPrompt>& prompts,
                                  const std::vector<int>& layer_ids, const std::string& model_id) {
  if (prompts.empty()) throw DegenerateInput("extract_activations: no prompts");
  for (int id : layer_ids) {
    if (id < 1 || id > model.config.n_layers) {
      throw ConfigError("layer " + std::to_string(id) + " outside 1.." +
                        std::to_string(model.config.n_layers));
    }
  }
  ActivationSet acts(model_id, layer_ids, model.config.d_model);
  ToyDecoder dec(model);
  std::vector<HiddenVector> outputs;
  for (const auto& p : prompts) {
    if (p.tokens.empty()) throw InvalidValue("extract_activations: empty prompt");
    if (static_cast<int>(p.tokens.size()) > model.config.max_seq) {
      throw SequenceTooLong("prompt " + std::to_string(p.id) + " has " +
                            std::to_string(p.tokens.size()) + " tokens, max_seq is " +
                            std::to_string(model.config.max_seq));
    }
    dec.reset();
    for (std::size_t i = 0; i < p.tokens.size(); ++i) {
      dec.step(p.tokens[i], nullptr, false, i + 1 == p.tokens.size() ? &outputs : nullptr);
    }
    std::vector<HiddenVector> row;
    for (int id : layer_ids) row.push_back(outputs[static_cast<std::size_t>(id - 1)]);
    acts.add_row(p.id, p.stance, row);
  }
  return acts;
}

namespace {

int sample_token(const Eigen::VectorXd& logits, const GenerationConfig& gen, Xoshiro256& rng) {
  Eigen::Index best = 0;
  const double mx = logits.maxCoeff(&best);
  if (gen.greedy) return static_cast<int>(best);
  Eigen::VectorXd p = ((logits.array() - mx) / gen.temperature).exp();
  const double total = p.sum();
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p(i);
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(best);
}

}  // namespace

GenerationResult generate(const ToyModelState& model, const std::vector<int>& prompt,
                          const GenerationConfig& gen, const InjectionPlan& plan, bool trace) {
  gen.validate();
  validate_plan(model, plan);
  if (prompt.empty()) throw InvalidValue("generate: empty prompt");
  if (static_cast<int>(prompt.size()) > model.config.max_seq) {
    throw SequenceTooLong("prompt has " + std::to_string(prompt.size()) +
                          " tokens, max_seq is " + std::to_string(model.config.max_seq));
  }
  const bool all_positions = plan.scope == InjectionScope::kAllPositions;

  ToyDecoder dec(model);
  Xoshiro256 rng(gen.rng_seed);
  GenerationResult out;
  std::vector<HiddenVector> outputs;
  for (std::size_t i = 0; i + 1 < prompt.size(); ++i) {
    dec.step(prompt[i], &plan, all_positions);
  }
  int current = prompt.back();
  for (int step = 0; step < gen.max_new_tokens; ++step) {
    if (dec.length() >= model.config.max_seq) {
      out.truncated = true;
      break;
    }
    const Eigen::VectorXd logits = dec.step(current, &plan, true, trace ? &outputs : nullptr);
    if (trace) out.trace.push_back(outputs);
    current = sample_token(logits, gen, rng);
    out.tokens.push_back(current);
  }
  out.text = decode_bytes(out.tokens);
  return out;
}

}  // namespace steer
