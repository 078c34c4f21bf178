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

#include "hesearch/bytes.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "hesearch/error.h"

namespace hesearch {

void ByteWriter::u16(std::uint16_t v) {
  out_.push_back(static_cast<std::uint8_t>(v >> 8));
  out_.push_back(static_cast<std::uint8_t>(v));
}

void ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::raw(std::string_view s) {
  out_.insert(out_.end(), s.begin(), s.end());
}

void ByteWriter::str16(std::string_view s) {
  if (s.size() > 0xFFFF) {
    throw Error(ErrorCode::kInvalidArgument, "string too long for 16-bit length");
  }
  u16(static_cast<std::uint16_t>(s.size()));
  raw(s);
}

void ByteWriter::blob32(ByteSpan bytes) {
  if (bytes.size() > 0xFFFFFFFFull) {
    throw Error(ErrorCode::kInvalidArgument, "blob too long for 32-bit length");
  }
  u32(static_cast<std::uint32_t>(bytes.size()));
  raw(bytes);
}

void ByteReader::need(std::size_t n) const {
  if (in_.size() - pos_ < n) {
    throw Error(ErrorCode::kMalformed,
                "truncated input: need " + std::to_string(n) + " bytes at offset " +
                    std::to_string(pos_));
  }
}

std::uint8_t ByteReader::u8() {
  need(1);
  return in_[pos_++];
}

std::uint16_t ByteReader::u16() {
  need(2);
  std::uint16_t v = static_cast<std::uint16_t>((in_[pos_] << 8) | in_[pos_ + 1]);
  pos_ += 2;
  return v;
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_ + i];
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_ + i];
  pos_ += 8;
  return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

ByteSpan ByteReader::raw(std::size_t n) {
  need(n);
  ByteSpan out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::string ByteReader::str16() {
  std::uint16_t n = u16();
  ByteSpan s = raw(n);
  return std::string(s.begin(), s.end());
}

ByteSpan ByteReader::blob32() { return raw(u32()); }

void ByteReader::expect_done(std::string_view what) const {
  if (!done()) {
    throw Error(ErrorCode::kMalformed, std::string(what) + ": " +
                                           std::to_string(remaining()) +
                                           " trailing bytes");
  }
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed: " + path.string());
  return out;
}

void write_file(const std::filesystem::path& path, ByteSpan bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace hesearch
