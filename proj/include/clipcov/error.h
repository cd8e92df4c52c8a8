// Copyright 2026 The Authors.
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

#ifndef CLIPCOV_ERROR_H_
#define CLIPCOV_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace clipcov {

enum class ErrorCode {
  kBadMagic,
  kBadFormat,
  kDimMismatch,
  kTruncated,
  kNonFinite,
  kZeroRow,
  kIoFailure,
  kIndexOutOfRange,
  kAlreadySelected,
  kNotSelected,
  kTooLarge,
  kBudgetTooLarge,
  kBudgetTooSmall,
  kLengthMismatch,
  kEmptySubset,
  kAllZero,
  kInvalidConfig,
  kUsage,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Input-side errors map to CLI exit status 2; everything else is internal.
bool IsInputError(ErrorCode code);

}  // namespace clipcov

#endif  // CLIPCOV_ERROR_H_
