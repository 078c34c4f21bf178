/*
 * Copyright 2026 The hesearch Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HESEARCH_ERROR_H_
#define HESEARCH_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace hesearch {

enum class ErrorCode {
  kInvalidParams,
  kOutOfRange,
  kTagMismatch,
  kLevelMismatch,
  kScaleMismatch,
  kDepthExhausted,
  kParamsMismatch,
  kInvalidArgument,
  kMalformed,
  kProtocol,
  kInconsistency,
  kTimeout,
  kTruncated,
  kOversize,
  kClosed,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hesearch

#endif  // HESEARCH_ERROR_H_
