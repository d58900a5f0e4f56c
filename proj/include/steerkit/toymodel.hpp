// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "steerkit/activations.hpp"
#include "steerkit/core.hpp"

namespace steer {

/// Byte-level pre-LayerNorm decoder. Layer ids are 1-based: layer l is the
/// residual stream right after block l.
struct ToyModelConfig {
  int vocab_size = 256;
  int d_model = 64;
  int n_layers = 6;
  int n_heads = 4;
  int max_seq = 256;
  std::uint64_t seed = 42;

  void validate() const;
  /// Closed-form parameter count: 2Vd + Sd + V + 2d + L(12d^2 + 9d).
  std::int64_t parameter_count() const;
};

struct ToyBlock {
  HiddenVector ln1_gamma, ln1_beta;
  MatrixXd wq, wk, wv, wo;  // d x d, applied as W * x
  HiddenVector ln2_gamma, ln2_beta;
  MatrixXd w1;  // 4d x d
  HiddenVector b1;
  MatrixXd w2;  // d x 4d
  HiddenVector b2;
};

struct ToyModelState {
  ToyModelConfig config;
  MatrixXd token_embedding;     // V x d
  MatrixXd position_embedding;  // S x d
  std::vector<ToyBlock> blocks;
  HiddenVector lnf_gamma, lnf_beta;
  MatrixXd head;  // V x d
  HiddenVector head_bias;

  std::int64_t parameter_count() const;
  /// FNV-1a over the IEEE-754 bit patterns of every parameter, in
  /// initialization order.
  std::uint64_t checksum() const;
  /// Same, restricted to block `index` (0-based).
  std::uint64_t block_checksum(std::size_t index) const;
};

/// Deterministic initialization from a xoshiro256** stream seeded by
/// config.seed. Weights are drawn uniformly; no transcendental functions are
/// involved, so the parameters are bit-identical on every platform.
///
///   token embedding     U(-0.3, 0.3)
///   position embedding  U(-0.05, 0.05)
///   wq, wk, wv, w1      U(-1/sqrt(fan_in), 1/sqrt(fan_in))
///   wo, w2              U(-1/sqrt(fan_in), 1/sqrt(fan_in)) / sqrt(2 L)
///   head                U(-1/sqrt(d), 1/sqrt(d))
///   LayerNorm gains 1, every bias 0.
///
/// Draw order: token embedding, position embedding, then per block wq, wk,
/// wv, wo, w1, w2, then head; each matrix filled row by row.
ToyModelState init_model(const ToyModelConfig& config = {});

std::vector<int> encode_bytes(std::string_view text);
std::string decode_bytes(const std::vector<int>& tokens);

enum class InjectionScope {
  kLastToken,     // only the position being decoded at each step
  kAllPositions,  // every processed position, prompt included (ablation)
};

struct InjectionEntry {
  int layer_id = 0;
  HiddenVector direction;  // unit norm
  double alpha = 1.0;
};

struct InjectionPlan {
  std::vector<InjectionEntry> entries;
  InjectionScope scope = InjectionScope::kLastToken;

  bool empty() const { return entries.empty(); }
  /// Distinct layers the plan writes to.
  std::vector<int> layers() const;
};

/// h + alpha * direction.
template <typename DerivedH, typename DerivedV>
Vector<typename DerivedH::Scalar> apply_injection(const Eigen::MatrixBase<DerivedH>& h,
                                                  const Eigen::MatrixBase<DerivedV>& direction,
                                                  typename DerivedH::Scalar alpha) {
  if (h.size() != direction.size()) {
    throw ShapeError("apply_injection: hidden size " + std::to_string(h.size()) +
                     " != direction size " + std::to_string(direction.size()));
  }
  return h + alpha * direction;
}

struct GenerationConfig {
  double temperature = 0.5;
  int max_new_tokens = 100;
  std::uint64_t rng_seed = 0;
  bool greedy = false;

  void validate() const;
};

struct GenerationResult {
  std::vector<int> tokens;  // newly generated only
  std::string text;
  bool truncated = false;   // stopped early because max_seq was reached
  /// When tracing: for each decoding step, the post-injection residual at
  /// every layer (index 0 = layer 1) at the decoded position.
  std::vector<std::vector<HiddenVector>> trace;
};

/// Incremental decoder with a per-layer key/value cache.
class ToyDecoder {
 public:
  explicit ToyDecoder(const ToyModelState& model);

  void reset();
  int length() const { return length_; }

  /// Feeds one token at the next position, applying `plan` entries when
  /// `inject` is set. Returns the logits; fills `layer_outputs` (one vector
  /// per block, post-injection) when non-null.
  Eigen::VectorXd step(int token, const InjectionPlan* plan, bool inject,
                       std::vector<HiddenVector>* layer_outputs = nullptr);

 private:
  const ToyModelState& model_;
  std::vector<MatrixXd> keys_;
  std::vector<MatrixXd> values_;
  int length_ = 0;
};

struct LabeledPrompt {
  std::uint64_t id = 0;
  Stance stance = Stance::kPositive;
  std::vector<int> tokens;
};

/// Residual stream after each requested block at the last prompt token.
/// Throws SequenceTooLong for prompts longer than max_seq, ConfigError for
/// unknown layer ids, DegenerateInput for an empty prompt list.
ActivationSet extract_activations(const ToyModelState& model,
                                  const std::vector<LabeledPrompt>& prompts,
                                  const std::vector<int>& layer_ids,
                                  const std::string& model_id = "toy");

/// Autoregressive generation. At every decoding step each plan entry adds
/// alpha * direction to the residual stream after its block, at the position
/// being decoded, before later blocks read it. The first decoding step is the
/// forward pass over the last prompt token. An empty plan (or alpha = 0)
/// reproduces unsteered generation bit for bit.
GenerationResult generate(const ToyModelState& model, const std::vector<int>& prompt,
                          const GenerationConfig& gen, const InjectionPlan& plan = {},
                          bool trace = false);

void validate_plan(const ToyModelState& model, const InjectionPlan& plan);

}  // namespace steer
