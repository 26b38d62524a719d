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

// Closed-form reference models with gradients and Hessian-vector products,
// plus a central-difference oracle for checking them.

#ifndef RLSUBSET_HVP_H_
#define RLSUBSET_HVP_H_

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rlsubset/vec.h"

namespace rlsubset {

// Dense row-major square matrix.
struct Matrix {
  std::size_t n = 0;
  std::vector<double> data;

  Matrix() = default;
  explicit Matrix(std::size_t size) : n(size), data(size * size, 0.0) {}

  static Matrix Identity(std::size_t size);
  static Matrix Diagonal(std::span<const double> diag);

  double& operator()(std::size_t r, std::size_t c) { return data[r * n + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * n + c];
  }
  Vector Apply(std::span<const double> v) const;
};

// loss(theta) = 0.5 theta^T A theta + b^T theta.
struct QuadraticModel {
  Matrix a;
  Vector b;
};

// Single-point logistic loss -[y log s + (1-y) log(1-s)], s = sigmoid(theta.x).
struct LogisticPointModel {
  Vector x;
  int y = 0;
};

using AnalyticModel = std::variant<QuadraticModel, LogisticPointModel>;

// Checks symmetry of A and dimensional consistency; throws on violation.
void ValidateModel(const AnalyticModel& model);
std::size_t ParameterDim(const AnalyticModel& model);

double Loss(const AnalyticModel& model, std::span<const double> theta);
Vector Grad(const AnalyticModel& model, std::span<const double> theta);
Vector Hvp(const AnalyticModel& model, std::span<const double> theta,
           std::span<const double> v);

// (grad(theta + eps v) - grad(theta - eps v)) / (2 eps).
Vector HvpFiniteDifference(const AnalyticModel& model,
                           std::span<const double> theta,
                           std::span<const double> v, double epsilon);

// d_i = H(theta) v. When `v` is empty the model gradient at theta is used.
Vector SampleDirection(const AnalyticModel& model,
                       std::span<const double> theta,
                       std::span<const double> v = {});

inline constexpr double kDefaultFdEpsilon = 1e-5;

struct HvpReport {
  std::string label;
  Vector analytic;
  Vector finite_difference;
  double max_abs_error = 0.0;
  // max_abs_error / max |analytic| (guarded at 1e-12).
  double max_rel_error = 0.0;
  double epsilon = kDefaultFdEpsilon;
};

HvpReport CompareHvp(const AnalyticModel& model, std::span<const double> theta,
                     std::span<const double> v, double epsilon,
                     std::string label = {});

// Randomized oracle sweep used by the verify-hvp command.
struct HvpSuiteResult {
  std::size_t trials = 0;
  double quadratic_max_abs_error = 0.0;
  double logistic_max_rel_error = 0.0;
  double linearity_max_error = 0.0;
  double symmetry_max_error = 0.0;
  std::vector<HvpReport> examples;  // A few representative rows.

  bool Passed() const {
    return quadratic_max_abs_error < 1e-10 && logistic_max_rel_error < 1e-6 &&
           linearity_max_error < 1e-10 && symmetry_max_error < 1e-10;
  }
};

HvpSuiteResult RunHvpSuite(std::uint64_t seed, std::size_t trials,
                           std::size_t dim = 6);

}  // namespace rlsubset

#endif  // RLSUBSET_HVP_H_
