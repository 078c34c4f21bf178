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

#include "hesearch/protocol/message.h"

#include "hesearch/he/serialization.h"

namespace hesearch::protocol {
namespace {

constexpr std::uint16_t kMaxErrorCode = static_cast<std::uint16_t>(ErrorCode::kIo);

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string_view tag_name(MessageTag tag) {
  switch (tag) {
    case MessageTag::kSearchRequest:
      return "SearchRequest";
    case MessageTag::kRoot:
      return "Root";
    case MessageTag::kDescend:
      return "Descend";
    case MessageTag::kChildren:
      return "Children";
    case MessageTag::kNotFound:
      return "NotFound";
    case MessageTag::kError:
      return "Error";
  }
  return "Unknown";
}

MessageTag tag_of(const Message& m) {
  return std::visit(Overloaded{
                        [](const SearchRequest&) { return MessageTag::kSearchRequest; },
                        [](const Root&) { return MessageTag::kRoot; },
                        [](const Descend&) { return MessageTag::kDescend; },
                        [](const Children&) { return MessageTag::kChildren; },
                        [](const NotFound&) { return MessageTag::kNotFound; },
                        [](const ErrorMessage&) { return MessageTag::kError; },
                    },
                    m);
}

Bytes encode_message(const Message& m) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(tag_of(m)));
  std::visit(Overloaded{
                 [&](const SearchRequest& r) { he::write_ciphertext(w, r.target); },
                 [&](const Root& r) {
                   w.u64(r.n_real);
                   he::write_ciphertext(w, r.node);
                 },
                 [&](const Descend& d) { w.u64(d.pivot); },
                 [&](const Children& c) {
                   he::write_ciphertext(w, c.left);
                   he::write_ciphertext(w, c.right);
                 },
                 [&](const NotFound&) {},
                 [&](const ErrorMessage& e) {
                   w.u16(static_cast<std::uint16_t>(e.code));
                   w.raw(std::string_view(e.detail));
                 },
             },
             m);
  return std::move(w).take();
}

Message decode_message(const he::Backend& backend, ByteSpan bytes) {
  ByteReader in(bytes);
  const std::uint8_t tag = in.u8();
  Message out;
  switch (static_cast<MessageTag>(tag)) {
    case MessageTag::kSearchRequest:
      out = SearchRequest{he::read_ciphertext(backend, in)};
      break;
    case MessageTag::kRoot: {
      Root r;
      r.n_real = in.u64();
      r.node = he::read_ciphertext(backend, in);
      out = std::move(r);
      break;
    }
    case MessageTag::kDescend:
      out = Descend{in.u64()};
      break;
    case MessageTag::kChildren: {
      Children c;
      c.left = he::read_ciphertext(backend, in);
      c.right = he::read_ciphertext(backend, in);
      out = std::move(c);
      break;
    }
    case MessageTag::kNotFound:
      out = NotFound{};
      break;
    case MessageTag::kError: {
      ErrorMessage e;
      std::uint16_t code = in.u16();
      e.code = code <= kMaxErrorCode ? static_cast<ErrorCode>(code) : ErrorCode::kProtocol;
      ByteSpan text = in.raw(in.remaining());
      e.detail.assign(text.begin(), text.end());
      out = std::move(e);
      break;
    }
    default:
      throw Error(ErrorCode::kMalformed, "unknown message tag " + std::to_string(tag));
  }
  in.expect_done("protocol message");
  return out;
}

}  // namespace hesearch::protocol
