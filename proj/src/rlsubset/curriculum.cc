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

#include "rlsubset/curriculum.h"

#include <algorithm>
#include <random>
#include <set>

namespace rlsubset {

std::vector<std::string> CurriculumSchedule::Flatten() const {
  std::vector<std::string> out;
  for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
  return out;
}

IdGroups Partition(const std::vector<std::string>& ids, std::size_t k,
                   std::uint64_t seed) {
  const std::size_t m = ids.size();
  if (m == 0) Fail(ErrorCode::kParameter, "cannot partition an empty subset");
  if (k == 0 || k > m) {
    Fail(ErrorCode::kParameter, "K must be in [1, " + std::to_string(m) +
                                    "], got " + std::to_string(k));
  }
  std::vector<std::string> shuffled = ids;
  std::mt19937_64 rng(seed);
  for (std::size_t i = m - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(shuffled[i], shuffled[pick(rng)]);
  }
  IdGroups groups(k);
  const std::size_t base = m / k;
  const std::size_t extra = m % k;
  std::size_t pos = 0;
  for (std::size_t g = 0; g < k; ++g) {
    const std::size_t size = base + (g < extra ? 1 : 0);
    groups[g].assign(shuffled.begin() + static_cast<long>(pos),
                     shuffled.begin() + static_cast<long>(pos + size));
    pos += size;
  }
  return groups;
}

IdGroups Partition(const SubsetManifest& manifest, std::size_t k,
                   std::uint64_t seed) {
  return Partition(manifest.Ids(), k, seed);
}

CurriculumSchedule SortWithinGroups(IdGroups groups,
                                    const std::map<std::string, double>& r_bar,
                                    std::uint64_t seed) {
  CurriculumSchedule sched;
  sched.k = groups.size();
  sched.seed = seed;
  std::set<std::string> seen;
  for (auto& group : groups) {
    for (const auto& id : group) {
      auto it = r_bar.find(id);
      if (it == r_bar.end()) {
        Fail(ErrorCode::kConfig, "no mean reward for id '" + id + "'");
      }
      if (!seen.insert(id).second) {
        Fail(ErrorCode::kValidation, "id '" + id + "' appears in two groups");
      }
      sched.r_bar[id] = it->second;
    }
    std::sort(group.begin(), group.end(),
              [&](const std::string& a, const std::string& b) {
                const double ra = r_bar.at(a);
                const double rb = r_bar.at(b);
                if (ra != rb) return ra > rb;
                return a < b;
              });
  }
  sched.groups = std::move(groups);
  return sched;
}

CurriculumSchedule BuildSchedule(const SubsetManifest& manifest,
                                 const std::map<std::string, double>& r_bar,
                                 std::size_t k, std::uint64_t seed) {
  return SortWithinGroups(Partition(manifest, k, seed), r_bar, seed);
}

}  // namespace rlsubset
