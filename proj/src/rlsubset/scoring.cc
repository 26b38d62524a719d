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

#include "rlsubset/scoring.h"

#include <algorithm>
#include <cmath>

namespace rlsubset {

void ScoringParams::Validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    Fail(ErrorCode::kParameter, "sigma must be > 0");
  }
  if (!std::isfinite(mu)) Fail(ErrorCode::kParameter, "mu must be finite");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    Fail(ErrorCode::kParameter, "lambda must be >= 0");
  }
}

long ScoreTable::IndexOf(const std::string& id) const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].id == id) return static_cast<long>(i);
  }
  return -1;
}

double Learnability(double r_bar, double mu, double sigma) {
  if (!(sigma > 0.0)) Fail(ErrorCode::kParameter, "sigma must be > 0");
  if (!std::isfinite(r_bar)) {
    Fail(ErrorCode::kValidation, "mean reward must be finite");
  }
  const double diff = r_bar - mu;
  return std::exp(-(diff * diff) / (2.0 * sigma * sigma));
}

std::vector<double> MinMaxNormalize(std::span<const double> values) {
  if (values.empty()) Fail(ErrorCode::kParameter, "cannot normalize empty list");
  if (!AllFinite(values)) {
    Fail(ErrorCode::kValidation, "cannot normalize non-finite values");
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<double> out(values.size(), 0.5);
  if (hi == lo) return out;
  const double range = hi - lo;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (values[i] - lo) / range;
  }
  // Pin the extremes exactly.
  out[lo_it - values.begin()] = 0.0;
  out[hi_it - values.begin()] = 1.0;
  return out;
}

Vector GlobalDirection(std::span<const Vector> directions) {
  if (directions.empty()) {
    Fail(ErrorCode::kParameter, "global direction of an empty set");
  }
  const std::size_t dim = directions.front().size();
  Vector sum(dim, 0.0);
  for (const Vector& d : directions) {
    RequireSameDim(d, sum, "global_direction");
    for (std::size_t k = 0; k < dim; ++k) sum[k] += d[k];
  }
  const double n = static_cast<double>(directions.size());
  for (double& x : sum) x /= n;
  return sum;
}

double Representativeness(std::span<const double> direction,
                          std::span<const double> global) {
  RequireSameDim(direction, global, "representativeness");
  return Cosine(direction, global, 0.0);
}

namespace {

ScoreTable ScoreLearnability(const Dataset& dataset,
                             const ScoringParams& params) {
  params.Validate();
  if (dataset.records.empty()) Fail(ErrorCode::kValidation, "empty dataset");
  ScoreTable table;
  table.params = params;
  table.samples.reserve(dataset.size());
  std::vector<double> ls;
  ls.reserve(dataset.size());
  for (const auto& rec : dataset.records) {
    SampleScore s;
    s.id = rec.id;
    s.r_bar = MeanReward(rec);
    s.l = Learnability(s.r_bar, params.mu, params.sigma);
    ls.push_back(s.l);
    table.samples.push_back(std::move(s));
  }
  const auto l_norm = MinMaxNormalize(ls);
  for (std::size_t i = 0; i < l_norm.size(); ++i) {
    table.samples[i].l_norm = l_norm[i];
  }
  return table;
}

}  // namespace

ScoreTable BuildScoreTable(const Dataset& dataset, const ScoringParams& params,
                           std::span<const Vector> directions) {
  if (directions.size() != dataset.size()) {
    Fail(ErrorCode::kConfig,
         "expected one direction per record (" +
             std::to_string(dataset.size()) + "), got " +
             std::to_string(directions.size()));
  }
  ScoreTable table = ScoreLearnability(dataset, params);
  Vector global = GlobalDirection(directions);
  std::vector<double> rs;
  rs.reserve(directions.size());
  for (const Vector& d : directions) rs.push_back(Representativeness(d, global));
  const auto r_norm = MinMaxNormalize(rs);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    table.samples[i].r = rs[i];
    table.samples[i].r_norm = r_norm[i];
  }
  table.global_direction = std::move(global);
  return table;
}

ScoreTable BuildScoreTable(const Dataset& dataset, const ScoringParams& params,
                           bool with_representativeness) {
  if (!with_representativeness) return ScoreLearnability(dataset, params);
  std::vector<Vector> directions;
  directions.reserve(dataset.size());
  for (const auto& rec : dataset.records) {
    if (!rec.grad) {
      Fail(ErrorCode::kConfig,
           "representativeness requested but record '" + rec.id +
               "' has no grad");
    }
    directions.push_back(*rec.grad);
  }
  return BuildScoreTable(dataset, params, directions);
}

}  // namespace rlsubset
