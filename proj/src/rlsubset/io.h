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

// JSON and text serialization of the pipeline artifacts.

#ifndef RLSUBSET_IO_H_
#define RLSUBSET_IO_H_

#include <string>

#include "rlsubset/curriculum.h"
#include "rlsubset/scoring.h"
#include "rlsubset/selection.h"

namespace rlsubset {

std::string ScoreTableToJson(const ScoreTable& table);
ScoreTable ScoreTableFromJson(const std::string& text);

std::string ManifestToJson(const SubsetManifest& manifest);
SubsetManifest ManifestFromJson(const std::string& text);

std::string ScheduleToJson(const CurriculumSchedule& schedule);
CurriculumSchedule ScheduleFromJson(const std::string& text);

// One id per line; each group is introduced by a "# group <n>" line.
std::string ScheduleToText(const CurriculumSchedule& schedule);
IdGroups ScheduleGroupsFromText(const std::string& text);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& contents);

}  // namespace rlsubset

#endif  // RLSUBSET_IO_H_
