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

#include "hesearch/ckks/modulus.h"

#include <bit>

#include "hesearch/error.h"

namespace hesearch::ckks {

Modulus::Modulus(std::uint64_t q) : q_(q) {
  if (q < 3 || (q & 1) == 0 || std::bit_width(q) > kMaxBits) {
    throw Error(ErrorCode::kInvalidParams,
                "modulus must be odd, at least 3 and below 2^61: " + std::to_string(q));
  }
  bits_ = std::bit_width(q);
  // q is odd, so floor((2^128 - 1) / q) == floor(2^128 / q).
  uint128_t ratio = ~uint128_t{0} / q;
  ratio_lo_ = static_cast<std::uint64_t>(ratio);
  ratio_hi_ = static_cast<std::uint64_t>(ratio >> 64);
}

std::uint64_t Modulus::pow(std::uint64_t base, std::uint64_t exp) const {
  std::uint64_t result = 1 % q_;
  base = reduce(base);
  while (exp != 0) {
    if (exp & 1) result = mul(result, base);
    base = mul(base, base);
    exp >>= 1;
  }
  return result;
}

std::uint64_t Modulus::inv(std::uint64_t a) const {
  a = reduce(a);
  if (a == 0) throw Error(ErrorCode::kInvalidArgument, "zero has no inverse");
  return pow(a, q_ - 2);
}

std::uint64_t Modulus::from_signed(std::int64_t v) const {
  if (v >= 0) return reduce(static_cast<std::uint64_t>(v));
  std::uint64_t r = reduce(static_cast<std::uint64_t>(-(v + 1)) + 1);
  return neg(r);
}

}  // namespace hesearch::ckks
