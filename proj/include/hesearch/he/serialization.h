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

#ifndef HESEARCH_HE_SERIALIZATION_H_
#define HESEARCH_HE_SERIALIZATION_H_

#include <string>
#include <string_view>

#include "hesearch/bytes.h"
#include "hesearch/he/backend.h"

namespace hesearch::he {

inline constexpr std::string_view kCiphertextMagic = "HSC1";
inline constexpr std::string_view kKeyFileMagic = "HSK1";

// Envelope written for ciphertexts whose level does not fit 16 bits.
inline constexpr std::uint16_t kUnboundedLevelField = 0xFFFF;

// Ciphertext envelope: magic | tag u8 | level u16 | scale f64 | length u32 |
// payload, all big-endian.
void write_ciphertext(ByteWriter& out, const Ciphertext& c);
Bytes serialize_ciphertext(const Ciphertext& c);
Ciphertext read_ciphertext(const Backend& backend, ByteReader& in);
Ciphertext deserialize_ciphertext(const Backend& backend, ByteSpan bytes);

// Key file: magic | params-id (u16 length + bytes) | public, secret, relin
// blobs (u32 length + bytes each). A public-only file has an empty secret.
Bytes serialize_key_file(const KeyPair& keys, bool include_secret);
std::string key_file_params_id(ByteSpan bytes);
// Parses a key file; the secret key is left empty for public-only files.
KeyPair parse_key_file(const Backend& backend, ByteSpan bytes);

}  // namespace hesearch::he

#endif  // HESEARCH_HE_SERIALIZATION_H_
