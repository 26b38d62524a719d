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

#ifndef RLSUBSET_DATASET_H_
#define RLSUBSET_DATASET_H_

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rlsubset/vec.h"

namespace rlsubset {

// One training sample as carried by the JSONL wire format.
struct SampleRecord {
  std::string id;
  Vector rollout_rewards;
  Vector features;
  // Per-sample optimization direction. Absent for reward-only datasets.
  std::optional<Vector> grad;
  // Unknown top-level keys, passed through verbatim. Non-string values are
  // stored as their JSON text.
  std::map<std::string, std::string> meta;
};

struct Dataset {
  std::vector<SampleRecord> records;
  std::size_t feature_dim = 0;
  std::optional<std::size_t> grad_dim;
  std::string source_path;

  std::size_t size() const { return records.size(); }
  // True when every record carries a direction vector.
  bool AllHaveGrad() const;
};

// Parses one JSONL line. line_number is only used in error messages.
SampleRecord ParseSampleRecord(std::string_view line,
                               std::size_t line_number = 1);

// Validates the collective invariants (non-empty, unique ids, consistent
// dimensions) and fills in feature_dim / grad_dim.
Dataset MakeDataset(std::vector<SampleRecord> records,
                    std::string source_path = {});

Dataset LoadDataset(const std::string& path);

std::string SerializeSampleRecord(const SampleRecord& record);
void WriteDataset(const Dataset& dataset, std::ostream& out);
void WriteDataset(const Dataset& dataset, const std::string& path);

// Average of the rollout rewards.
double MeanReward(const SampleRecord& record);

}  // namespace rlsubset

#endif  // RLSUBSET_DATASET_H_
