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

#ifndef RLSUBSET_SCORING_H_
#define RLSUBSET_SCORING_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rlsubset/dataset.h"
#include "rlsubset/vec.h"

namespace rlsubset {

struct ScoringParams {
  double mu = 0.5;
  double sigma = 0.25;
  // Weight of representativeness in the selection value. 1 is the best
  // setting reported for the method and is the shipped default.
  double lambda = 1.0;

  void Validate() const;
};

struct SampleScore {
  std::string id;
  double r_bar = 0.0;
  double l = 0.0;
  double l_norm = 0.0;
  std::optional<double> r;
  std::optional<double> r_norm;
};

// Per-sample scores in dataset order, plus the parameters that produced them.
struct ScoreTable {
  ScoringParams params;
  std::vector<SampleScore> samples;
  std::optional<Vector> global_direction;

  bool has_representativeness() const { return global_direction.has_value(); }
  // Index of `id`, or -1.
  long IndexOf(const std::string& id) const;
};

// Gaussian learnability exp(-(r_bar - mu)^2 / (2 sigma^2)).
double Learnability(double r_bar, double mu, double sigma);

// Min-max rescale to [0, 1]. A constant input maps to all 0.5.
std::vector<double> MinMaxNormalize(std::span<const double> values);

// Elementwise mean of the per-sample directions.
Vector GlobalDirection(std::span<const Vector> directions);

// Cosine similarity of a sample direction with the global direction.
// Zero-norm inputs score 0.
double Representativeness(std::span<const double> direction,
                          std::span<const double> global);

// Scores every record. When `with_representativeness` is set, each record's
// grad is used as its direction and all records must carry one.
ScoreTable BuildScoreTable(const Dataset& dataset, const ScoringParams& params,
                           bool with_representativeness);

// Same, with explicitly supplied directions (one per record).
ScoreTable BuildScoreTable(const Dataset& dataset, const ScoringParams& params,
                           std::span<const Vector> directions);

}  // namespace rlsubset

#endif  // RLSUBSET_SCORING_H_
