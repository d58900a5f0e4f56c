// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "steerkit/core.hpp"
#include "steerkit/rng.hpp"

using namespace steer;

TEST(Standardize, TwoPointSymmetric) {
  MatrixXd x(2, 2);
  x << 0, 0, 2, 2;
  const auto p = standardize_fit(x);
  EXPECT_EQ(p.means, Eigen::Vector2d(1, 1));
  EXPECT_EQ(p.stds, Eigen::Vector2d(1, 1));
}

TEST(Standardize, ZeroVarianceClamped) {
  MatrixXd x(2, 2);
  x << 5, 5, 5, 5;
  const auto p = standardize_fit(x);
  EXPECT_EQ(p.means, Eigen::Vector2d(5, 5));
  EXPECT_EQ(p.stds, Eigen::Vector2d(1, 1));
}

TEST(Standardize, GaussianMatchesTwoPassOracle) {
  fixtures::Gaussian g(7);
  MatrixXd x(100, 3);
  const double true_mean[] = {1.0, -2.0, 0.5}, true_sd[] = {1.0, 3.0, 0.2};
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = true_mean[j] + true_sd[j] * g();
  }
  const auto p = standardize_fit(x);
  const auto [m, s] = oracle::mean_std(oracle::to_rows(x));
  for (int j = 0; j < 3; ++j) {
    EXPECT_NEAR(p.means(j), m[j], 1e-12);
    EXPECT_NEAR(p.stds(j), s[j], 1e-12);
    EXPECT_LT(std::fabs(p.means(j) - true_mean[j]), 3 * true_sd[j] / 10.0);
  }
}

TEST(Standardize, Errors) {
  EXPECT_THROW(standardize_fit(MatrixXd::Zero(1, 3)), DegenerateInput);
  MatrixXd x = MatrixXd::Zero(3, 2);
  x(1, 1) = std::nan("");
  EXPECT_THROW(standardize_fit(x), InvalidValue);
  x(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(standardize_fit(x), InvalidValue);
  StandardizationParams p{Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(3)};
  EXPECT_THROW(standardize_apply(MatrixXd::Zero(2, 2), p), ShapeError);
}

TEST(Standardize, ApplyExamples) {
  StandardizationParams id{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)};
  MatrixXd x(2, 2);
  x << 1.5, -2, 3, 4;
  EXPECT_EQ(standardize_apply(x, id), x);
  StandardizationParams p{Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 2.0)};
  EXPECT_EQ(standardize_apply(MatrixXd::Constant(1, 1, 3.0), p)(0, 0), 1.0);
}

TEST(Standardize, PropertyZeroMeanUnitStd) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    fixtures::Gaussian g(seed);
    const int n = 2 + static_cast<int>(g.rng().below(40)), d = 1 + static_cast<int>(g.rng().below(6));
    MatrixXd x(n, d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) x(i, j) = 10 * g() + static_cast<double>(j);
    }
    const MatrixXd z = standardize_apply(x, standardize_fit(x));
    for (int j = 0; j < d; ++j) {
      const double mean = z.col(j).mean();
      const double sd = std::sqrt((z.col(j).array() - mean).square().mean());
      EXPECT_LT(std::fabs(mean), 1e-9);
      EXPECT_LT(std::fabs(sd - 1.0), 1e-6);
    }
  }
}

TEST(Standardize, FloatScalar) {
  Eigen::MatrixXf x(2, 1);
  x << 1.f, 3.f;
  const auto p = standardize_fit(x);
  EXPECT_FLOAT_EQ(p.means(0), 2.f);
  EXPECT_FLOAT_EQ(p.stds(0), 1.f);
}

TEST(UnitNormalize, Examples) {
  const HiddenVector v = unit_normalize(Eigen::Vector2d(3, 4));
  EXPECT_NEAR(v(0), 0.6, 1e-15);
  EXPECT_NEAR(v(1), 0.8, 1e-15);
  EXPECT_NEAR((unit_normalize(v) - v).norm(), 0.0, 1e-9);
  EXPECT_THROW(unit_normalize(Eigen::Vector2d(0, 0)), ZeroNormError);
}

TEST(UnitNormalize, ScaleInvariantAndIdempotent) {
  fixtures::Gaussian g(3);
  for (int t = 0; t < 100; ++t) {
    HiddenVector v(5);
    for (int i = 0; i < 5; ++i) v(i) = g();
    const double c = 1e-3 + 1e3 * g.rng().uniform();
    const HiddenVector u = unit_normalize(v);
    EXPECT_NEAR(u.norm(), 1.0, 1e-9);
    EXPECT_LT((unit_normalize(HiddenVector(c * v)) - u).norm(), 1e-9);
    EXPECT_LT((unit_normalize(u) - u).norm(), 1e-9);
  }
}

TEST(Cosine, Examples) {
  const Eigen::Vector3d a(1, 2, 3);
  EXPECT_NEAR(cosine_similarity(a, a), 1.0, 1e-15);
  EXPECT_EQ(cosine_similarity(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)), 0.0);
  EXPECT_NEAR(cosine_similarity(a, Eigen::Vector3d(-a)), -1.0, 1e-15);
  EXPECT_THROW(cosine_similarity(a, Eigen::Vector3d::Zero()), ZeroNormError);
  EXPECT_THROW(cosine_similarity(HiddenVector(a), HiddenVector(Eigen::Vector2d(1, 1))), ShapeError);
}

TEST(Cosine, SymmetricScaleInvariantBounded) {
  fixtures::Gaussian g(11);
  for (int t = 0; t < 200; ++t) {
    HiddenVector a(4), b(4);
    for (int i = 0; i < 4; ++i) {
      a(i) = g();
      b(i) = g();
    }
    const double c = cosine_similarity(a, b);
    EXPECT_LE(std::fabs(c), 1.0);
    EXPECT_NEAR(c, oracle::cosine(oracle::to_std(a), oracle::to_std(b)), 1e-12);
    EXPECT_NEAR(c, cosine_similarity(b, a), 1e-15);
    EXPECT_NEAR(c, cosine_similarity(HiddenVector(3.5 * a), b), 1e-12);
  }
}

TEST(Enums, ParseAndPrint) {
  EXPECT_EQ(parse_axis("economic"), BiasAxis::kEconomic);
  EXPECT_EQ(parse_axis("social"), BiasAxis::kSocial);
  EXPECT_EQ(to_string(BiasAxis::kSocial), "social");
  EXPECT_THROW(parse_axis("cultural"), ConfigError);
  EXPECT_EQ(parse_stance("positive"), Stance::kPositive);
}

TEST(LanguageTag, Validation) {
  EXPECT_EQ(LanguageTag().code(), "en");
  EXPECT_EQ(LanguageTag("ur").code(), "ur");
  EXPECT_THROW(LanguageTag(""), InvalidValue);
  EXPECT_THROW(LanguageTag("EN"), InvalidValue);
  EXPECT_THROW(LanguageTag("pa-IN"), InvalidValue);
}

TEST(Rng, DeterministicStreams) {
  Xoshiro256 a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs = differs || x != c.next();
  }
  EXPECT_TRUE(differs);
  Xoshiro256 r(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(r.below(7), 7u);
  }
  EXPECT_NE(derive_seed(42, "a", 0), derive_seed(42, "b", 0));
  EXPECT_NE(derive_seed(42, "a", 0), derive_seed(42, "a", 1));
}
