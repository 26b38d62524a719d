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

// Dense vector helpers shared by the scoring, hvp and selection modules.

#ifndef RLSUBSET_VEC_H_
#define RLSUBSET_VEC_H_

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rlsubset/error.h"

namespace rlsubset {

using Vector = std::vector<double>;

// Norms below this are treated as zero by the cosine-based scores.
inline constexpr double kZeroNormThreshold = 1e-12;

inline void RequireSameDim(std::span<const double> a, std::span<const double> b,
                           const char* what) {
  if (a.size() != b.size()) {
    Fail(ErrorCode::kDimension, std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
  }
}

inline double Dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

inline double Norm(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

// Cosine similarity; returns `fallback` when either norm is numerically zero.
inline double Cosine(std::span<const double> a, std::span<const double> b,
                     double fallback) {
  const double na = Norm(a);
  const double nb = Norm(b);
  if (na < kZeroNormThreshold || nb < kZeroNormThreshold) return fallback;
  double c = Dot(a, b) / (na * nb);
  // Rounding can push |c| a hair past 1.
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return c;
}

inline bool AllFinite(std::span<const double> a) {
  for (double x : a) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace rlsubset

#endif  // RLSUBSET_VEC_H_
