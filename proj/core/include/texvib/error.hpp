// Copyright 2026 The texvib Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace texvib {

/// Coarse failure category. The CLI prints it as the machine-parsable
/// prefix of its one-line error message and maps it to an exit code.
enum class ErrorCode {
  kInvalidArgument,  // value outside its documented domain
  kDimension,        // shape / length mismatch
  kFormat,           // malformed or unsupported file content
  kIo,               // filesystem failure
  kMismatch,         // two artifacts disagree (sample rate, class list, ...)
  kNumeric,          // NaN / Inf encountered during computation
  kInternal,         // invariant violated inside the library
};

std::string_view to_string(ErrorCode code);

/// Exit code used by the CLI for a given category (usage errors use 2).
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace texvib
