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

#include "rlsubset/selection.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

namespace rlsubset {
namespace {

void CheckSubsetSize(std::size_t m, std::size_t n) {
  if (m == 0) Fail(ErrorCode::kParameter, "subset size m must be >= 1");
  if (m > n) {
    Fail(ErrorCode::kParameter, "subset size m=" + std::to_string(m) +
                                    " exceeds dataset size " +
                                    std::to_string(n));
  }
}

}  // namespace

const char* SelectionModeName(SelectionMode mode) {
  return mode == SelectionMode::kRandom ? "random" : "minirec";
}

SelectionMode ParseSelectionMode(const std::string& name) {
  if (name == "minirec") return SelectionMode::kMiniRec;
  if (name == "random") return SelectionMode::kRandom;
  Fail(ErrorCode::kParameter, "unknown selection mode '" + name +
                                  "' (expected minirec or random)");
}

std::vector<std::string> SubsetManifest::Ids() const {
  std::vector<std::string> ids;
  ids.reserve(picks.size());
  for (const auto& p : picks) ids.push_back(p.id);
  return ids;
}

double CosineDistance(std::span<const double> a, std::span<const double> b) {
  RequireSameDim(a, b, "cosine_distance");
  return 1.0 - Cosine(a, b, 0.0);
}

double Diversity(std::span<const double> candidate,
                 std::span<const Vector> selected) {
  if (selected.empty()) return 1.0;
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& s : selected) {
    best = std::min(best, CosineDistance(candidate, s));
  }
  return best;
}

double CandidateValue(double l_norm, std::optional<double> r_norm,
                      double d_norm, double lambda) {
  if (!r_norm) return d_norm * l_norm;
  return d_norm * (l_norm + lambda * *r_norm);
}

GreedySelector::GreedySelector(const Dataset& dataset,
                               const ScoreTable& scores)
    : dataset_(dataset), scores_(scores) {
  std::unordered_map<std::string, std::size_t> by_id;
  by_id.reserve(scores.samples.size());
  for (std::size_t i = 0; i < scores.samples.size(); ++i) {
    by_id.emplace(scores.samples[i].id, i);
  }
  score_index_.reserve(dataset.size());
  for (const auto& rec : dataset.records) {
    auto it = by_id.find(rec.id);
    if (it == by_id.end()) {
      Fail(ErrorCode::kConfig, "score table has no entry for id '" + rec.id + "'");
    }
    score_index_.push_back(it->second);
  }
}

SubsetManifest GreedySelector::Select(const GreedyOptions& options) {
  const std::size_t n = dataset_.size();
  CheckSubsetSize(options.m, n);
  if (!(options.lambda >= 0.0)) {
    Fail(ErrorCode::kParameter, "lambda must be >= 0");
  }
  const bool use_r = scores_.has_representativeness();
  if (options.require_representativeness && !use_r) {
    Fail(ErrorCode::kConfig,
         "representativeness requested but the score table has none");
  }

  SubsetManifest manifest;
  manifest.mode = SelectionMode::kMiniRec;
  manifest.m = options.m;
  manifest.lambda = options.lambda;

  // Infinity marks "no distance yet", i.e. the empty subset.
  min_distance_.assign(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> remaining(n);
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<double> d_raw;

  for (std::size_t step = 0; step < options.m; ++step) {
    d_raw.resize(remaining.size());
    for (std::size_t j = 0; j < remaining.size(); ++j) {
      const double d = min_distance_[remaining[j]];
      d_raw[j] = std::isinf(d) ? 1.0 : d;
    }
    const std::vector<double> d_norm = MinMaxNormalize(d_raw);

    std::size_t best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < remaining.size(); ++j) {
      const SampleScore& s = scores_.samples[score_index_[remaining[j]]];
      const double v = CandidateValue(
          s.l_norm, use_r ? s.r_norm : std::nullopt, d_norm[j], options.lambda);
      if (v > best_v ||
          (v == best_v && dataset_.records[remaining[j]].id <
                              dataset_.records[remaining[best]].id)) {
        best = j;
        best_v = v;
      }
    }

    const std::size_t chosen = remaining[best];
    manifest.picks.push_back(
        Pick{dataset_.records[chosen].id, step, d_norm[best], best_v});
    remaining.erase(remaining.begin() + static_cast<long>(best));

    const Vector& f = dataset_.records[chosen].features;
    for (std::size_t idx : remaining) {
      min_distance_[idx] = std::min(
          min_distance_[idx], CosineDistance(dataset_.records[idx].features, f));
    }
  }
  return manifest;
}

SubsetManifest GreedySelect(const Dataset& dataset, const ScoreTable& scores,
                            const GreedyOptions& options) {
  GreedySelector selector(dataset, scores);
  return selector.Select(options);
}

SubsetManifest RandomSelect(const Dataset& dataset, std::size_t m,
                            std::uint64_t seed) {
  CheckSubsetSize(m, dataset.size());
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: only the first m positions are needed.
  for (std::size_t i = 0; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  SubsetManifest manifest;
  manifest.mode = SelectionMode::kRandom;
  manifest.m = m;
  manifest.seed = seed;
  for (std::size_t i = 0; i < m; ++i) {
    manifest.picks.push_back(Pick{dataset.records[order[i]].id, i, {}, {}});
  }
  return manifest;
}

}  // namespace rlsubset
