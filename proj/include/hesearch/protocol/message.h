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

#ifndef HESEARCH_PROTOCOL_MESSAGE_H_
#define HESEARCH_PROTOCOL_MESSAGE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "hesearch/bytes.h"
#include "hesearch/error.h"
#include "hesearch/he/backend.h"

namespace hesearch::protocol {

enum class MessageTag : std::uint8_t {
  kSearchRequest = 0,
  kRoot = 1,
  kDescend = 2,
  kChildren = 3,
  kNotFound = 4,
  kError = 255,
};

std::string_view tag_name(MessageTag tag);

struct SearchRequest {
  he::Ciphertext target;
};

// The root also tells the client how many real leaves the tree has, so it
// can stop at the leaf level and recognize padding leaves.
struct Root {
  std::uint64_t n_real = 0;
  he::Ciphertext node;
};

struct Descend {
  std::uint64_t pivot = 0;
};

struct Children {
  he::Ciphertext left;
  he::Ciphertext right;
};

struct NotFound {};

struct ErrorMessage {
  ErrorCode code = ErrorCode::kProtocol;
  std::string detail;
};

using Message = std::variant<SearchRequest, Root, Descend, Children, NotFound, ErrorMessage>;

MessageTag tag_of(const Message& m);

// Tag byte, then: SearchRequest/Root ciphertext envelope (Root prefixed by
// n_real u64), Descend pivot u64, Children two envelopes, NotFound nothing,
// Error code u16 and UTF-8 detail. Big-endian throughout.
Bytes encode_message(const Message& m);
Message decode_message(const he::Backend& backend, ByteSpan bytes);

}  // namespace hesearch::protocol

#endif  // HESEARCH_PROTOCOL_MESSAGE_H_
