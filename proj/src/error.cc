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

#include "hesearch/error.h"

namespace hesearch {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParams:
      return "invalid-params";
    case ErrorCode::kOutOfRange:
      return "out-of-range";
    case ErrorCode::kTagMismatch:
      return "tag-mismatch";
    case ErrorCode::kLevelMismatch:
      return "level-mismatch";
    case ErrorCode::kScaleMismatch:
      return "scale-mismatch";
    case ErrorCode::kDepthExhausted:
      return "depth-exhausted";
    case ErrorCode::kParamsMismatch:
      return "params-mismatch";
    case ErrorCode::kInvalidArgument:
      return "invalid-argument";
    case ErrorCode::kMalformed:
      return "malformed";
    case ErrorCode::kProtocol:
      return "protocol-error";
    case ErrorCode::kInconsistency:
      return "inconsistency-error";
    case ErrorCode::kTimeout:
      return "timeout";
    case ErrorCode::kTruncated:
      return "truncated-stream";
    case ErrorCode::kOversize:
      return "oversize";
    case ErrorCode::kClosed:
      return "connection-closed";
    case ErrorCode::kIo:
      return "io-error";
  }
  return "unknown";
}

}  // namespace hesearch
