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

#ifndef RLSUBSET_CURRICULUM_H_
#define RLSUBSET_CURRICULUM_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rlsubset/selection.h"

namespace rlsubset {

using IdGroups = std::vector<std::vector<std::string>>;

struct CurriculumSchedule {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  IdGroups groups;
  // Mean rewards the groups were sorted by.
  std::map<std::string, double> r_bar;

  // Groups concatenated in consumption order.
  std::vector<std::string> Flatten() const;
  bool operator==(const CurriculumSchedule&) const = default;
};

// Seeded shuffle of the manifest ids split into k contiguous chunks. The
// first (m mod k) chunks hold one extra id.
IdGroups Partition(const SubsetManifest& manifest, std::size_t k,
                   std::uint64_t seed);
IdGroups Partition(const std::vector<std::string>& ids, std::size_t k,
                   std::uint64_t seed);

// Orders every group by descending mean reward (easy first), ties by id.
CurriculumSchedule SortWithinGroups(IdGroups groups,
                                    const std::map<std::string, double>& r_bar,
                                    std::uint64_t seed = 0);

CurriculumSchedule BuildSchedule(const SubsetManifest& manifest,
                                 const std::map<std::string, double>& r_bar,
                                 std::size_t k, std::uint64_t seed);

}  // namespace rlsubset

#endif  // RLSUBSET_CURRICULUM_H_
