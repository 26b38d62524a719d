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

#ifndef RLSUBSET_ERROR_H_
#define RLSUBSET_ERROR_H_

#include <stdexcept>
#include <string>

namespace rlsubset {

// Error categories. The numeric values are mirrored by rls_status in the
// C API, so they must stay in sync with include/rlsubset/rlsubset.h.
enum class ErrorCode : int {
  kParse = 1,
  kSchema = 2,
  kValidation = 3,
  kDimension = 4,
  kParameter = 5,
  kConfig = 6,
  kIo = 7,
  kNumeric = 8,
  kInternal = 9,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace rlsubset

#endif  // RLSUBSET_ERROR_H_
