// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "steerkit/core.hpp"

namespace steer {

/// Last-token hidden states for a batch of labeled prompts, one n x d matrix
/// per layer. Row i of every layer matrix belongs to prompt i.
class ActivationSet {
 public:
  ActivationSet() = default;
  ActivationSet(std::string model_id, std::vector<int> layer_ids, Eigen::Index hidden_dim);

  /// Bulk construction; `layers[i]` is the n x d matrix for layer_ids[i].
  static ActivationSet from_layers(std::string model_id, std::vector<int> layer_ids,
                                   std::vector<std::uint64_t> prompt_ids,
                                   std::vector<Stance> stances, std::vector<MatrixXd> layers);

  /// Appends one prompt. `per_layer` holds one vector per layer id, in
  /// layer_ids() order.
  void add_row(std::uint64_t prompt_id, Stance stance,
               const std::vector<HiddenVector>& per_layer);

  const std::string& model_id() const { return model_id_; }
  const std::vector<int>& layer_ids() const { return layer_ids_; }
  Eigen::Index hidden_dim() const { return hidden_dim_; }
  std::size_t rows() const { return prompt_ids_.size(); }
  const std::vector<std::uint64_t>& prompt_ids() const { return prompt_ids_; }
  const std::vector<Stance>& stances() const { return stances_; }

  bool has_layer(int layer_id) const;
  /// Position of `layer_id` within layer_ids(); throws ConfigError if absent.
  std::size_t layer_index(int layer_id) const;

  /// All rows at one layer (n x d).
  const MatrixXd& layer(int layer_id) const;
  MatrixXd& mutable_layer(int layer_id);

  MatrixXd rows_with_stance(int layer_id, Stance stance) const;
  std::size_t count(Stance stance) const;

  /// Returns a copy with the stance of every row flipped.
  ActivationSet with_swapped_labels() const;
  /// Returns a copy restricted to the given layers (in the given order).
  ActivationSet select_layers(const std::vector<int>& layer_ids) const;

  friend bool operator==(const ActivationSet& a, const ActivationSet& b);

 private:
  std::string model_id_;
  std::vector<int> layer_ids_;
  Eigen::Index hidden_dim_ = 0;
  std::vector<std::uint64_t> prompt_ids_;
  std::vector<Stance> stances_;
  std::vector<MatrixXd> layers_;
};

}  // namespace steer
