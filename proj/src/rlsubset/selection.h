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

#ifndef RLSUBSET_SELECTION_H_
#define RLSUBSET_SELECTION_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rlsubset/dataset.h"
#include "rlsubset/scoring.h"

namespace rlsubset {

enum class SelectionMode { kMiniRec, kRandom };

const char* SelectionModeName(SelectionMode mode);
SelectionMode ParseSelectionMode(const std::string& name);

struct Pick {
  std::string id;
  std::size_t step = 0;
  std::optional<double> d_norm;
  std::optional<double> v;
};

// Ordered selection trace.
struct SubsetManifest {
  SelectionMode mode = SelectionMode::kMiniRec;
  std::size_t m = 0;
  double lambda = 1.0;
  std::optional<std::uint64_t> seed;
  std::vector<Pick> picks;

  std::vector<std::string> Ids() const;
};

// 1 - cos(a, b), in [0, 2]. Zero-norm inputs give the neutral value 1.
double CosineDistance(std::span<const double> a, std::span<const double> b);

// Minimum cosine distance from the candidate to any selected vector; 1 when
// nothing has been selected yet.
double Diversity(std::span<const double> candidate,
                 std::span<const Vector> selected);

// D_norm * (L_norm + lambda * R_norm), or D_norm * L_norm without R.
double CandidateValue(double l_norm, std::optional<double> r_norm,
                      double d_norm, double lambda);

struct GreedyOptions {
  std::size_t m = 0;
  double lambda = 1.0;
  // Fail unless the score table carries representativeness.
  bool require_representativeness = false;
};

// Diversity-driven greedy subset construction. Each step computes every
// remaining candidate's minimum distance to the subset, rescales those
// distances to [0, 1] over the remaining pool, and takes the argmax of the
// value (ties go to the smallest id).
//
// Not thread-safe: the selector owns a per-candidate min-distance cache that
// is updated with one new distance per step.
class GreedySelector {
 public:
  GreedySelector(const Dataset& dataset, const ScoreTable& scores);

  SubsetManifest Select(const GreedyOptions& options);

 private:
  const Dataset& dataset_;
  // score_index_[i] is the row of scores_ for dataset record i.
  std::vector<std::size_t> score_index_;
  const ScoreTable& scores_;
  std::vector<double> min_distance_;
};

SubsetManifest GreedySelect(const Dataset& dataset, const ScoreTable& scores,
                            const GreedyOptions& options);

// Uniform sample without replacement, deterministic under seed.
SubsetManifest RandomSelect(const Dataset& dataset, std::size_t m,
                            std::uint64_t seed);

}  // namespace rlsubset

#endif  // RLSUBSET_SELECTION_H_
