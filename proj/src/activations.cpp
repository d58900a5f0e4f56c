// SPDX-License-Identifier: Apache-2.0

#include "steerkit/activations.hpp"

#include <algorithm>
#include <set>

namespace steer {

ActivationSet::ActivationSet(std::string model_id, std::vector<int> layer_ids,
                             Eigen::Index hidden_dim)
    : model_id_(std::move(model_id)), layer_ids_(std::move(layer_ids)), hidden_dim_(hidden_dim) {
  if (hidden_dim_ < 1) throw ShapeError("ActivationSet: hidden_dim must be >= 1");
  if (layer_ids_.empty()) throw ShapeError("ActivationSet: no layers");
  if (std::set<int>(layer_ids_.begin(), layer_ids_.end()).size() != layer_ids_.size()) {
    throw ShapeError("ActivationSet: duplicate layer id");
  }
  layers_.assign(layer_ids_.size(), MatrixXd(0, hidden_dim_));
}

ActivationSet ActivationSet::from_layers(std::string model_id, std::vector<int> layer_ids,
                                         std::vector<std::uint64_t> prompt_ids,
                                         std::vector<Stance> stances, std::vector<MatrixXd> layers) {
  if (layers.empty()) throw ShapeError("ActivationSet: no layers");
  ActivationSet out(std::move(model_id), std::move(layer_ids), layers.front().cols());
  if (layers.size() != out.layer_ids_.size()) throw ShapeError("ActivationSet: layer count mismatch");
  if (prompt_ids.size() != stances.size()) throw ShapeError("ActivationSet: row label mismatch");
  for (const auto& m : layers) {
    if (m.rows() != static_cast<Eigen::Index>(prompt_ids.size()) || m.cols() != out.hidden_dim_) {
      throw ShapeError("ActivationSet: layer matrix shape mismatch");
    }
    if (!m.allFinite()) throw InvalidValue("ActivationSet: non-finite activation");
  }
  out.prompt_ids_ = std::move(prompt_ids);
  out.stances_ = std::move(stances);
  out.layers_ = std::move(layers);
  return out;
}

void ActivationSet::add_row(std::uint64_t prompt_id, Stance stance,
                            const std::vector<HiddenVector>& per_layer) {
  if (per_layer.size() != layer_ids_.size()) {
    throw ShapeError("ActivationSet::add_row: expected " + std::to_string(layer_ids_.size()) +
                     " layer vectors, got " + std::to_string(per_layer.size()));
  }
  for (const auto& v : per_layer) {
    if (v.size() != hidden_dim_) {
      throw ShapeError("ActivationSet::add_row: vector length " + std::to_string(v.size()) +
                       " != hidden_dim " + std::to_string(hidden_dim_));
    }
    if (!v.allFinite()) throw InvalidValue("ActivationSet::add_row: non-finite activation");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(prompt_ids_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].conservativeResize(n + 1, hidden_dim_);
    layers_[l].row(n) = per_layer[l].transpose();
  }
  prompt_ids_.push_back(prompt_id);
  stances_.push_back(stance);
}

bool ActivationSet::has_layer(int layer_id) const {
  return std::find(layer_ids_.begin(), layer_ids_.end(), layer_id) != layer_ids_.end();
}

std::size_t ActivationSet::layer_index(int layer_id) const {
  auto it = std::find(layer_ids_.begin(), layer_ids_.end(), layer_id);
  if (it == layer_ids_.end()) {
    throw ConfigError("layer " + std::to_string(layer_id) + " not present in activation set");
  }
  return static_cast<std::size_t>(it - layer_ids_.begin());
}

const MatrixXd& ActivationSet::layer(int layer_id) const { return layers_[layer_index(layer_id)]; }

MatrixXd& ActivationSet::mutable_layer(int layer_id) { return layers_[layer_index(layer_id)]; }

MatrixXd ActivationSet::rows_with_stance(int layer_id, Stance stance) const {
  const MatrixXd& all = layer(layer_id);
  MatrixXd out(static_cast<Eigen::Index>(count(stance)), hidden_dim_);
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < stances_.size(); ++i) {
    if (stances_[i] == stance) out.row(r++) = all.row(static_cast<Eigen::Index>(i));
  }
  return out;
}

std::size_t ActivationSet::count(Stance stance) const {
  return static_cast<std::size_t>(std::count(stances_.begin(), stances_.end(), stance));
}

ActivationSet ActivationSet::with_swapped_labels() const {
  ActivationSet out = *this;
  for (auto& s : out.stances_) {
    s = s == Stance::kPositive ? Stance::kNegative : Stance::kPositive;
  }
  return out;
}

ActivationSet ActivationSet::select_layers(const std::vector<int>& layer_ids) const {
  ActivationSet out(model_id_, layer_ids, hidden_dim_);
  out.prompt_ids_ = prompt_ids_;
  out.stances_ = stances_;
  for (std::size_t i = 0; i < layer_ids.size(); ++i) out.layers_[i] = layer(layer_ids[i]);
  return out;
}

}  // namespace steer

namespace steer {

bool operator==(const ActivationSet& a, const ActivationSet& b) {
  if (a.model_id_ != b.model_id_ || a.layer_ids_ != b.layer_ids_ ||
      a.hidden_dim_ != b.hidden_dim_ || a.prompt_ids_ != b.prompt_ids_ ||
      a.stances_ != b.stances_ || a.layers_.size() != b.layers_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.layers_.size(); ++i) {
    if (!same_values(a.layers_[i], b.layers_[i])) return false;
  }
  return true;
}

}  // namespace steer
