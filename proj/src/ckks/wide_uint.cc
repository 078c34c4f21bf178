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

#include "hesearch/ckks/wide_uint.h"

#include <bit>
#include <cmath>

#include "hesearch/ckks/modulus.h"
#include "hesearch/error.h"

namespace hesearch::ckks {

WideUint WideUint::from_double(double v) {
  if (!(v >= 0) || !std::isfinite(v) || std::floor(v) != v) {
    throw Error(ErrorCode::kInvalidArgument, "expected a nonnegative integral value");
  }
  WideUint out;
  if (v == 0) return out;
  int exp = 0;
  double frac = std::frexp(v, &exp);
  auto mantissa = static_cast<std::uint64_t>(std::ldexp(frac, 53));
  int shift = exp - 53;
  if (shift <= 0) {
    out.limbs_[0] = mantissa >> (-shift);
    return out;
  }
  auto limb = static_cast<std::size_t>(shift / 64);
  int bit = shift % 64;
  if (limb + 1 >= kLimbs) throw Error(ErrorCode::kOutOfRange, "value too wide");
  out.limbs_[limb] = mantissa << bit;
  if (bit != 0) out.limbs_[limb + 1] = mantissa >> (64 - bit);
  return out;
}

WideUint WideUint::from_bytes_be(ByteSpan bytes) {
  WideUint out;
  if (bytes.size() > kLimbs * 8) throw Error(ErrorCode::kMalformed, "integer too wide");
  std::size_t n = bytes.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t pos = n - 1 - i;  // byte i counted from least significant
    out.limbs_[i / 8] |= std::uint64_t{bytes[pos]} << (8 * (i % 8));
  }
  return out;
}

bool WideUint::is_zero() const {
  for (std::uint64_t l : limbs_) {
    if (l != 0) return false;
  }
  return true;
}

std::size_t WideUint::bit_width() const {
  for (std::size_t i = kLimbs; i-- > 0;) {
    if (limbs_[i] != 0) return i * 64 + static_cast<std::size_t>(std::bit_width(limbs_[i]));
  }
  return 0;
}

void WideUint::add_product(const WideUint& a, std::uint64_t m) {
  uint128_t carry = 0;
  for (std::size_t i = 0; i < kLimbs; ++i) {
    uint128_t t = uint128_t{a.limbs_[i]} * m + limbs_[i] + carry;
    limbs_[i] = static_cast<std::uint64_t>(t);
    carry = t >> 64;
  }
  if (carry != 0) throw Error(ErrorCode::kOutOfRange, "wide integer overflow");
}

void WideUint::subtract(const WideUint& b) {
  std::uint64_t borrow = 0;
  for (std::size_t i = 0; i < kLimbs; ++i) {
    std::uint64_t bi = b.limbs_[i];
    std::uint64_t d = limbs_[i] - bi - borrow;
    borrow = (limbs_[i] < bi || (limbs_[i] == bi && borrow)) ? 1 : 0;
    limbs_[i] = d;
  }
}

WideUint WideUint::shifted_right_one() const {
  WideUint out;
  for (std::size_t i = 0; i < kLimbs; ++i) {
    out.limbs_[i] = limbs_[i] >> 1;
    if (i + 1 < kLimbs) out.limbs_[i] |= limbs_[i + 1] << 63;
  }
  return out;
}

std::uint64_t WideUint::mod(std::uint64_t q) const {
  uint128_t r = 0;
  for (std::size_t i = kLimbs; i-- > 0;) {
    r = ((r << 64) | limbs_[i]) % q;
  }
  return static_cast<std::uint64_t>(r);
}

Bytes WideUint::to_bytes_be() const {
  std::size_t nbytes = (bit_width() + 7) / 8;
  Bytes out(nbytes);
  for (std::size_t i = 0; i < nbytes; ++i) {
    out[nbytes - 1 - i] = static_cast<std::uint8_t>(limbs_[i / 8] >> (8 * (i % 8)));
  }
  return out;
}

long double WideUint::to_long_double() const {
  long double v = 0;
  for (std::size_t i = kLimbs; i-- > 0;) {
    v = v * 0x1p64L + static_cast<long double>(limbs_[i]);
  }
  return v;
}

std::strong_ordering operator<=>(const WideUint& a, const WideUint& b) {
  for (std::size_t i = WideUint::kLimbs; i-- > 0;) {
    if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] <=> b.limbs_[i];
  }
  return std::strong_ordering::equal;
}

}  // namespace hesearch::ckks
