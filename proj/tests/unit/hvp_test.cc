// Copyright 2026 The rlsubset Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "rlsubset/error.h"
#include "rlsubset/hvp.h"
#include "test_util.h"

namespace rlsubset {
namespace {

using ::rlsubset::testing::CodeOf;

QuadraticModel Quad(Vector diag, Vector b) {
  return {Matrix::Diagonal(diag), std::move(b)};
}

Vector RandomVec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (double& x : v) x = g(rng);
  return v;
}

// Random symmetric matrix built by the test itself.
Matrix RandomSymmetric(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      m(i, j) = m(j, i) = g(rng);
    }
  }
  return m;
}

double MaxAbsDiff(const Vector& a, const Vector& b) {
  double e = 0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

TEST(GradTest, Examples) {
  EXPECT_EQ(Grad(Quad({2, 4}, {0, 0}), Vector{1, 1}), (Vector{2, 4}));
  EXPECT_EQ(Grad(Quad({2, 4}, {3, -1}), Vector{0, 0}), (Vector{3, -1}));
  for (int y : {0, 1}) {
    EXPECT_EQ(Grad(LogisticPointModel{{0, 0}, y}, Vector{0.3, -2}), (Vector{0, 0}));
  }
}

TEST(HvpTest, Examples) {
  EXPECT_EQ(Hvp(Quad({2, 4}, {0, 0}), Vector{5, 5}, Vector{1, 1}), (Vector{2, 4}));
  EXPECT_EQ(Hvp(QuadraticModel{Matrix::Identity(2), {0, 0}}, Vector{1, 1},
                Vector{0.3, -0.7}),
            (Vector{0.3, -0.7}));
  EXPECT_EQ(Hvp(Quad({2, 4}, {1, 1}), Vector{1, 1}, Vector{0, 0}), (Vector{0, 0}));
  EXPECT_EQ(Hvp(LogisticPointModel{{1, 2}, 1}, Vector{1, 1}, Vector{0, 0}),
            (Vector{0, 0}));
}

TEST(HvpTest, DimensionAndModelErrors) {
  EXPECT_EQ(CodeOf([] { Hvp(Quad({2, 4}, {0, 0}), Vector{1}, Vector{1, 1}); }),
            ErrorCode::kDimension);
  Matrix asym(2);
  asym(0, 1) = 1.0;
  EXPECT_EQ(CodeOf([&] { ValidateModel(QuadraticModel{asym, {0, 0}}); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([] { ValidateModel(LogisticPointModel{{1}, 2}); }),
            ErrorCode::kValidation);
}

TEST(HvpFiniteDifferenceTest, QuadraticExactAtMilliEpsilon) {
  const AnalyticModel q = Quad({2, 4}, {1, -3});
  const Vector fd = HvpFiniteDifference(q, Vector{0.2, 0.7}, Vector{1, -1}, 1e-3);
  EXPECT_LT(MaxAbsDiff(fd, {2, -4}), 1e-10);
}

TEST(HvpFiniteDifferenceTest, LogisticMidpoint) {
  const Vector fd = HvpFiniteDifference(LogisticPointModel{{1, 0}, 1}, Vector{0, 0},
                                        Vector{1, 0}, 1e-4);
  EXPECT_NEAR(fd[0], 0.25, 1e-9);
  EXPECT_NEAR(fd[1], 0.0, 1e-12);
}

TEST(HvpFiniteDifferenceTest, ZeroDirectionAndBadEpsilon) {
  const AnalyticModel m = LogisticPointModel{{1, 2}, 0};
  EXPECT_EQ(HvpFiniteDifference(m, Vector{0.1, 0.1}, Vector{0, 0}, 1e-5),
            (Vector{0, 0}));
  EXPECT_EQ(CodeOf([&] { HvpFiniteDifference(m, Vector{0, 0}, Vector{1, 0}, 0.0); }),
            ErrorCode::kParameter);
}

TEST(HvpPropertyTest, QuadraticFdExactForAnyEpsilon) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> log_eps(std::log(1e-6), std::log(1e-2));
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + t % 7;
    QuadraticModel q{RandomSymmetric(rng, n), RandomVec(rng, n)};
    const Vector theta = RandomVec(rng, n), v = RandomVec(rng, n);
    const double eps = std::exp(log_eps(rng));
    EXPECT_LT(MaxAbsDiff(HvpFiniteDifference(q, theta, v, eps), Hvp(q, theta, v)),
              1e-10)
        << "eps=" << eps;
  }
}

TEST(HvpPropertyTest, LogisticMatchesIndependentHessian) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + t % 7;
    const Vector x = RandomVec(rng, n), theta = RandomVec(rng, n),
                 v = RandomVec(rng, n);
    const int y = t % 2;
    // H = s(1-s) x x^T, written out directly.
    double z = 0;
    for (std::size_t i = 0; i < n; ++i) z += theta[i] * x[i];
    const double s = 1.0 / (1.0 + std::exp(-z));
    Vector expect(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) expect[i] += s * (1 - s) * x[i] * x[j] * v[j];
    }
    const LogisticPointModel m{x, y};
    const Vector an = Hvp(m, theta, v);
    double scale = 1e-12;
    for (double e : expect) scale = std::max(scale, std::abs(e));
    EXPECT_LT(MaxAbsDiff(an, expect) / scale, 1e-12);
    EXPECT_LT(MaxAbsDiff(HvpFiniteDifference(m, theta, v, 1e-5), an) / scale, 1e-6);
  }
}

TEST(HvpPropertyTest, LinearInDirection) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + t % 6;
    const AnalyticModel m =
        t % 2 ? AnalyticModel(QuadraticModel{RandomSymmetric(rng, n), RandomVec(rng, n)})
              : AnalyticModel(LogisticPointModel{RandomVec(rng, n), 1});
    const Vector theta = RandomVec(rng, n), u = RandomVec(rng, n),
                 w = RandomVec(rng, n);
    const double a = g(rng), b = g(rng);
    Vector mix(n);
    for (std::size_t i = 0; i < n; ++i) mix[i] = a * u[i] + b * w[i];
    const Vector hu = Hvp(m, theta, u), hw = Hvp(m, theta, w);
    Vector lin(n);
    for (std::size_t i = 0; i < n; ++i) lin[i] = a * hu[i] + b * hw[i];
    EXPECT_LT(MaxAbsDiff(Hvp(m, theta, mix), lin), 1e-10);
  }
}

TEST(HvpPropertyTest, HessianSymmetric) {
  // u^T H w == w^T H u
  std::mt19937_64 rng(24);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + t % 6;
    const AnalyticModel m =
        t % 2 ? AnalyticModel(QuadraticModel{RandomSymmetric(rng, n), RandomVec(rng, n)})
              : AnalyticModel(LogisticPointModel{RandomVec(rng, n), 0});
    const Vector theta = RandomVec(rng, n), u = RandomVec(rng, n),
                 w = RandomVec(rng, n);
    const Vector hu = Hvp(m, theta, u), hw = Hvp(m, theta, w);
    double a = 0, b = 0;
    for (std::size_t i = 0; i < n; ++i) {
      a += w[i] * hu[i];
      b += u[i] * hw[i];
    }
    EXPECT_NEAR(a, b, 1e-10);
  }
}

TEST(SampleDirectionTest, Examples) {
  EXPECT_EQ(SampleDirection(Quad({2, 4}, {0, 0}), Vector{1, 1}), (Vector{4, 16}));
  // At the minimum theta* = -A^{-1} b the gradient vanishes.
  EXPECT_EQ(SampleDirection(Quad({2, 4}, {2, -8}), Vector{-1, 2}), (Vector{0, 0}));
  const Vector theta = {0.3, -1.5, 2.0};
  EXPECT_EQ(SampleDirection(QuadraticModel{Matrix::Identity(3), {0, 0, 0}}, theta),
            theta);
  // Explicit v overrides the gradient.
  EXPECT_EQ(SampleDirection(Quad({2, 4}, {0, 0}), Vector{1, 1}, Vector{1, 0}),
            (Vector{2, 0}));
}

TEST(RunHvpSuiteTest, PassesAndIsDeterministic) {
  const HvpSuiteResult a = RunHvpSuite(9, 200);
  const HvpSuiteResult b = RunHvpSuite(9, 200);
  EXPECT_TRUE(a.Passed());
  EXPECT_EQ(a.trials, 200u);
  EXPECT_EQ(a.quadratic_max_abs_error, b.quadratic_max_abs_error);
  EXPECT_EQ(a.logistic_max_rel_error, b.logistic_max_rel_error);
  EXPECT_FALSE(a.examples.empty());
}

}  // namespace
}  // namespace rlsubset
