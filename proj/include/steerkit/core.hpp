// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "steerkit/error.hpp"

namespace steer {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Hidden-space vector. All library math is double precision; on-disk
/// activations are float32 and widened on read.
using HiddenVector = Vector<double>;
using MatrixXd = Matrix<double>;

enum class BiasAxis : std::uint8_t { kEconomic = 0, kSocial = 1 };

/// Positive is the left / libertarian framing, Negative the right /
/// authoritarian framing. Numeric values are the on-disk stance byte.
enum class Stance : std::uint8_t { kNegative = 0, kPositive = 1 };

std::string_view to_string(BiasAxis axis);
std::string_view to_string(Stance stance);
BiasAxis parse_axis(std::string_view text);
Stance parse_stance(std::string_view text);

/// Short language identifier ("en", "ur", "pa", ...). Non-empty lowercase
/// ASCII letters only.
class LanguageTag {
 public:
  LanguageTag() : code_("en") {}
  explicit LanguageTag(std::string code);

  const std::string& code() const noexcept { return code_; }
  static bool is_valid(std::string_view code);

  friend bool operator==(const LanguageTag&, const LanguageTag&) = default;
  friend auto operator<=>(const LanguageTag&, const LanguageTag&) = default;

 private:
  std::string code_;
};

/// Per-feature mean and population standard deviation.
template <typename Scalar>
struct Standardization {
  Vector<Scalar> means;
  Vector<Scalar> stds;

  Eigen::Index dim() const { return means.size(); }
};

using StandardizationParams = Standardization<double>;

/// Columns whose population std falls below this are treated as constant and
/// get std 1 so they pass through centered but unscaled.
inline constexpr double kMinStd = 1e-12;

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& x) {
  return x.allFinite();
}

/// Fits per-column mean and population std over the rows of `x`.
template <typename Derived>
Standardization<typename Derived::Scalar> standardize_fit(
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (x.rows() < 2) {
    throw DegenerateInput("standardize_fit: need at least 2 rows, got " +
                          std::to_string(x.rows()));
  }
  if (!x.allFinite()) {
    throw InvalidValue("standardize_fit: non-finite entry in input");
  }
  Standardization<Scalar> p;
  const Scalar n = static_cast<Scalar>(x.rows());
  p.means = x.colwise().sum().transpose() / n;
  p.stds = ((x.rowwise() - p.means.transpose()).colwise().squaredNorm().transpose() / n)
               .cwiseSqrt();
  for (Eigen::Index j = 0; j < p.stds.size(); ++j) {
    if (p.stds(j) < Scalar(kMinStd)) p.stds(j) = Scalar(1);
  }
  return p;
}

template <typename Derived>
Matrix<typename Derived::Scalar> standardize_apply(
    const Eigen::MatrixBase<Derived>& x,
    const Standardization<typename Derived::Scalar>& params) {
  if (x.cols() != params.means.size() || params.stds.size() != params.means.size()) {
    throw ShapeError("standardize_apply: matrix has " + std::to_string(x.cols()) +
                     " columns, params have " + std::to_string(params.means.size()));
  }
  return ((x.rowwise() - params.means.transpose()).array().rowwise() /
          params.stds.transpose().array())
      .matrix();
}

template <typename Derived>
Vector<typename Derived::Scalar> unit_normalize(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Scalar norm = v.norm();
  if (!(norm > Scalar(0)) || !std::isfinite(static_cast<double>(norm))) {
    throw ZeroNormError("unit_normalize: vector has zero (or non-finite) norm");
  }
  return v / norm;
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_similarity(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size()) {
    throw ShapeError("cosine_similarity: length mismatch " + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()));
  }
  const Scalar na = a.norm();
  const Scalar nb = b.norm();
  if (!(na > Scalar(0)) || !(nb > Scalar(0))) {
    throw ZeroNormError("cosine_similarity: zero vector");
  }
  const Scalar c = a.dot(b) / (na * nb);
  return std::clamp(c, Scalar(-1), Scalar(1));
}

}  // namespace steer

namespace steer {

/// Size-aware exact equality (Eigen's operator== requires equal shapes).
template <typename DerivedA, typename DerivedB>
bool same_values(const Eigen::DenseBase<DerivedA>& a, const Eigen::DenseBase<DerivedB>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.derived().array() == b.derived().array()).all();
}

}  // namespace steer
