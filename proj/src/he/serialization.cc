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

#include "hesearch/he/serialization.h"

#include <algorithm>

#include "hesearch/error.h"

namespace hesearch::he {
namespace {

void expect_magic(ByteReader& in, std::string_view magic, std::string_view what) {
  ByteSpan got = in.raw(magic.size());
  if (!std::equal(got.begin(), got.end(), magic.begin())) {
    throw Error(ErrorCode::kMalformed, std::string("bad ") + std::string(what) + " magic");
  }
}

}  // namespace

void write_ciphertext(ByteWriter& out, const Ciphertext& c) {
  if (c.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot serialize empty ciphertext");
  out.raw(kCiphertextMagic);
  out.u8(static_cast<std::uint8_t>(c.backend()));
  out.u16(c.level() >= kUnboundedLevelField ? kUnboundedLevelField
                                            : static_cast<std::uint16_t>(c.level()));
  out.f64(c.scale());
  out.blob32(c.payload());
}

Bytes serialize_ciphertext(const Ciphertext& c) {
  ByteWriter w;
  write_ciphertext(w, c);
  return std::move(w).take();
}

Ciphertext read_ciphertext(const Backend& backend, ByteReader& in) {
  expect_magic(in, kCiphertextMagic, "ciphertext");
  std::uint8_t tag = in.u8();
  if (tag > static_cast<std::uint8_t>(BackendTag::kCkks)) {
    throw Error(ErrorCode::kMalformed, "unknown backend tag " + std::to_string(tag));
  }
  if (static_cast<BackendTag>(tag) != backend.tag()) {
    throw Error(ErrorCode::kTagMismatch,
                std::string(backend_name(static_cast<BackendTag>(tag))) +
                    " ciphertext given to " + std::string(backend_name(backend.tag())) +
                    " backend");
  }
  std::uint16_t level = in.u16();
  double scale = in.f64();
  ByteSpan payload = in.blob32();
  return backend.parse_ciphertext(level, scale, payload);
}

Ciphertext deserialize_ciphertext(const Backend& backend, ByteSpan bytes) {
  ByteReader in(bytes);
  Ciphertext c = read_ciphertext(backend, in);
  in.expect_done("ciphertext envelope");
  return c;
}

Bytes serialize_key_file(const KeyPair& keys, bool include_secret) {
  ByteWriter w;
  w.raw(kKeyFileMagic);
  w.str16(keys.params_id());
  w.blob32(keys.public_key.bytes());
  w.blob32(include_secret ? keys.secret_key.bytes() : Bytes{});
  w.blob32(keys.relin_key.bytes());
  return std::move(w).take();
}

std::string key_file_params_id(ByteSpan bytes) {
  ByteReader in(bytes);
  expect_magic(in, kKeyFileMagic, "key file");
  return in.str16();
}

KeyPair parse_key_file(const Backend& backend, ByteSpan bytes) {
  ByteReader in(bytes);
  expect_magic(in, kKeyFileMagic, "key file");
  std::string params_id = in.str16();
  if (params_id != backend.params_id()) {
    throw Error(ErrorCode::kParamsMismatch,
                "key file is for '" + params_id + "', expected '" + backend.params_id() + "'");
  }
  ByteSpan pk = in.blob32();
  ByteSpan sk = in.blob32();
  ByteSpan rlk = in.blob32();
  in.expect_done("key file");
  KeyPair keys;
  keys.public_key = backend.parse_public_key(pk);
  if (!sk.empty()) keys.secret_key = backend.parse_secret_key(sk);
  keys.relin_key = backend.parse_relin_key(rlk);
  return keys;
}

}  // namespace hesearch::he
