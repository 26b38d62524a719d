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

#include "rlsubset/hvp.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <type_traits>

namespace rlsubset {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

template <typename T>
T Sigmoid(T z) {
  if (z >= 0) return T(1) / (T(1) + std::exp(-z));
  const T e = std::exp(z);
  return e / (T(1) + e);
}

void RequireDim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    Fail(ErrorCode::kDimension, std::string(what) + ": expected dimension " +
                                    std::to_string(want) + ", got " +
                                    std::to_string(got));
  }
}

// Gradient evaluated in scalar type T. The finite-difference oracle runs in
// extended precision so that cancellation in g(theta+eps v) - g(theta-eps v)
// stays far below the tolerances it is checked against.
template <typename T>
std::vector<T> GradIn(const AnalyticModel& model, std::span<const T> theta) {
  return std::visit(
      Overloaded{
          [&](const QuadraticModel& q) {
            std::vector<T> g(q.a.n, T(0));
            for (std::size_t r = 0; r < q.a.n; ++r) {
              T acc = T(q.b[r]);
              for (std::size_t c = 0; c < q.a.n; ++c) {
                acc += T(q.a(r, c)) * theta[c];
              }
              g[r] = acc;
            }
            return g;
          },
          [&](const LogisticPointModel& p) {
            T z = T(0);
            for (std::size_t k = 0; k < p.x.size(); ++k) z += theta[k] * T(p.x[k]);
            const T coeff = Sigmoid(z) - T(p.y);
            std::vector<T> g(p.x.size());
            for (std::size_t k = 0; k < p.x.size(); ++k) g[k] = coeff * T(p.x[k]);
            return g;
          }},
      model);
}

}  // namespace

Matrix Matrix::Identity(std::size_t size) {
  Matrix m(size);
  for (std::size_t i = 0; i < size; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::Diagonal(std::span<const double> diag) {
  Matrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Vector Matrix::Apply(std::span<const double> v) const {
  RequireDim(v.size(), n, "matrix apply");
  Vector out(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) acc += (*this)(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

void ValidateModel(const AnalyticModel& model) {
  std::visit(Overloaded{[](const QuadraticModel& q) {
                          if (q.a.data.size() != q.a.n * q.a.n) {
                            Fail(ErrorCode::kDimension, "A is not square");
                          }
                          RequireDim(q.b.size(), q.a.n, "quadratic b");
                          double asym = 0.0;
                          for (std::size_t r = 0; r < q.a.n; ++r) {
                            for (std::size_t c = 0; c < q.a.n; ++c) {
                              asym = std::max(asym,
                                              std::abs(q.a(r, c) - q.a(c, r)));
                            }
                          }
                          if (!(asym < 1e-12)) {
                            Fail(ErrorCode::kValidation, "A is not symmetric");
                          }
                        },
                        [](const LogisticPointModel& p) {
                          if (p.x.empty()) {
                            Fail(ErrorCode::kDimension, "empty logistic input");
                          }
                          if (p.y != 0 && p.y != 1) {
                            Fail(ErrorCode::kValidation,
                                 "logistic label must be 0 or 1");
                          }
                        }},
             model);
}

std::size_t ParameterDim(const AnalyticModel& model) {
  return std::visit(
      Overloaded{[](const QuadraticModel& q) { return q.a.n; },
                 [](const LogisticPointModel& p) { return p.x.size(); }},
      model);
}

double Loss(const AnalyticModel& model, std::span<const double> theta) {
  RequireDim(theta.size(), ParameterDim(model), "loss theta");
  return std::visit(
      Overloaded{[&](const QuadraticModel& q) {
                   const Vector at = q.a.Apply(theta);
                   return 0.5 * Dot(theta, at) + Dot(q.b, theta);
                 },
                 [&](const LogisticPointModel& p) {
                   const double z = Dot(theta, p.x);
                   // log(1 + e^-z) and log(1 + e^z) without overflow.
                   const double log1pexp_neg = std::max(-z, 0.0) +
                                               std::log1p(std::exp(-std::abs(z)));
                   const double log1pexp_pos = log1pexp_neg + z;
                   return p.y == 1 ? log1pexp_neg : log1pexp_pos;
                 }},
      model);
}

Vector Grad(const AnalyticModel& model, std::span<const double> theta) {
  RequireDim(theta.size(), ParameterDim(model), "grad theta");
  return GradIn<double>(model, theta);
}

Vector Hvp(const AnalyticModel& model, std::span<const double> theta,
           std::span<const double> v) {
  const std::size_t dim = ParameterDim(model);
  RequireDim(theta.size(), dim, "hvp theta");
  RequireDim(v.size(), dim, "hvp v");
  return std::visit(
      Overloaded{[&](const QuadraticModel& q) { return q.a.Apply(v); },
                 [&](const LogisticPointModel& p) {
                   const double s = Sigmoid(Dot(theta, p.x));
                   const double coeff = s * (1.0 - s) * Dot(p.x, v);
                   Vector out(dim);
                   for (std::size_t k = 0; k < dim; ++k) out[k] = coeff * p.x[k];
                   return out;
                 }},
      model);
}

Vector HvpFiniteDifference(const AnalyticModel& model,
                           std::span<const double> theta,
                           std::span<const double> v, double epsilon) {
  if (!(epsilon > 0.0)) Fail(ErrorCode::kParameter, "epsilon must be > 0");
  const std::size_t dim = ParameterDim(model);
  RequireDim(theta.size(), dim, "hvp theta");
  RequireDim(v.size(), dim, "hvp v");
  using Wide = long double;
  const Wide eps = epsilon;
  std::vector<Wide> plus(dim), minus(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    plus[k] = Wide(theta[k]) + eps * Wide(v[k]);
    minus[k] = Wide(theta[k]) - eps * Wide(v[k]);
  }
  const auto gp = GradIn<Wide>(model, std::span<const Wide>(plus));
  const auto gm = GradIn<Wide>(model, std::span<const Wide>(minus));
  Vector out(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    out[k] = static_cast<double>((gp[k] - gm[k]) / (Wide(2) * eps));
  }
  return out;
}

Vector SampleDirection(const AnalyticModel& model,
                       std::span<const double> theta,
                       std::span<const double> v) {
  if (v.empty()) {
    const Vector g = Grad(model, theta);
    return Hvp(model, theta, g);
  }
  return Hvp(model, theta, v);
}

HvpReport CompareHvp(const AnalyticModel& model, std::span<const double> theta,
                     std::span<const double> v, double epsilon,
                     std::string label) {
  HvpReport rep;
  rep.label = std::move(label);
  rep.epsilon = epsilon;
  rep.analytic = Hvp(model, theta, v);
  rep.finite_difference = HvpFiniteDifference(model, theta, v, epsilon);
  double scale = 0.0;
  for (std::size_t k = 0; k < rep.analytic.size(); ++k) {
    rep.max_abs_error = std::max(
        rep.max_abs_error, std::abs(rep.analytic[k] - rep.finite_difference[k]));
    scale = std::max(scale, std::abs(rep.analytic[k]));
  }
  rep.max_rel_error = rep.max_abs_error / std::max(scale, 1e-12);
  if (scale == 0.0 && rep.max_abs_error == 0.0) rep.max_rel_error = 0.0;
  return rep;
}

namespace {

Vector RandomVector(std::mt19937_64& rng, std::size_t dim, double lo,
                    double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(dim);
  for (double& x : v) x = u(rng);
  return v;
}

QuadraticModel RandomQuadratic(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  QuadraticModel q{Matrix(dim), RandomVector(rng, dim, -1.0, 1.0)};
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = r; c < dim; ++c) {
      const double x = u(rng);
      q.a(r, c) = x;
      q.a(c, r) = x;
    }
  }
  return q;
}

}  // namespace

HvpSuiteResult RunHvpSuite(std::uint64_t seed, std::size_t trials,
                           std::size_t dim) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_eps(std::log(1e-6),
                                                 std::log(1e-2));
  std::bernoulli_distribution coin(0.5);
  HvpSuiteResult res;
  res.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    const Vector theta = RandomVector(rng, dim, -2.0, 2.0);
    const Vector v = RandomVector(rng, dim, -1.0, 1.0);
    const Vector u = RandomVector(rng, dim, -1.0, 1.0);
    const Vector w = RandomVector(rng, dim, -1.0, 1.0);
    const double alpha = std::uniform_real_distribution<double>(-2, 2)(rng);
    const double beta = std::uniform_real_distribution<double>(-2, 2)(rng);

    const AnalyticModel quad = RandomQuadratic(rng, dim);
    const double eps = std::exp(log_eps(rng));
    const HvpReport qrep = CompareHvp(quad, theta, v, eps, "quadratic");
    res.quadratic_max_abs_error =
        std::max(res.quadratic_max_abs_error, qrep.max_abs_error);

    const AnalyticModel logi = LogisticPointModel{
        RandomVector(rng, dim, -1.0, 1.0), coin(rng) ? 1 : 0};
    const HvpReport lrep =
        CompareHvp(logi, theta, v, kDefaultFdEpsilon, "logistic");
    res.logistic_max_rel_error =
        std::max(res.logistic_max_rel_error, lrep.max_rel_error);

    for (const AnalyticModel* m : {&quad, &logi}) {
      Vector mix(dim);
      for (std::size_t k = 0; k < dim; ++k) mix[k] = alpha * u[k] + beta * w[k];
      const Vector lhs = Hvp(*m, theta, mix);
      const Vector hu = Hvp(*m, theta, u);
      const Vector hw = Hvp(*m, theta, w);
      for (std::size_t k = 0; k < dim; ++k) {
        res.linearity_max_error =
            std::max(res.linearity_max_error,
                     std::abs(lhs[k] - (alpha * hu[k] + beta * hw[k])));
      }
      res.symmetry_max_error =
          std::max(res.symmetry_max_error, std::abs(Dot(u, hw) - Dot(w, hu)));
    }
    if (t < 2) {
      res.examples.push_back(qrep);
      res.examples.push_back(lrep);
    }
  }
  return res;
}

}  // namespace rlsubset
