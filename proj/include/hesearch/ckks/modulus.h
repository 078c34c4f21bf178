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

#ifndef HESEARCH_CKKS_MODULUS_H_
#define HESEARCH_CKKS_MODULUS_H_

#include <cstdint>

namespace hesearch::ckks {

__extension__ using uint128_t = unsigned __int128;

// An odd prime modulus below 2^61 with precomputed Barrett constants.
class Modulus {
 public:
  static constexpr int kMaxBits = 61;

  Modulus() = default;
  explicit Modulus(std::uint64_t q);

  std::uint64_t value() const { return q_; }
  int bits() const { return bits_; }

  // x mod q for any 128-bit x < q * 2^64.
  std::uint64_t reduce(uint128_t x) const {
    auto x0 = static_cast<std::uint64_t>(x);
    auto x1 = static_cast<std::uint64_t>(x >> 64);
    // Quotient estimate floor(x * floor(2^128 / q) / 2^128), off by at most one.
    std::uint64_t carry = static_cast<std::uint64_t>((uint128_t{x0} * ratio_lo_) >> 64);
    uint128_t t = uint128_t{x0} * ratio_hi_ + carry;
    uint128_t u = uint128_t{x1} * ratio_lo_ + static_cast<std::uint64_t>(t);
    std::uint64_t quotient =
        x1 * ratio_hi_ + static_cast<std::uint64_t>(t >> 64) + static_cast<std::uint64_t>(u >> 64);
    std::uint64_t r = x0 - quotient * q_;
    return r >= q_ ? r - q_ : r;
  }
  std::uint64_t reduce(std::uint64_t x) const { return reduce(uint128_t{x}); }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b;
    return s >= q_ ? s - q_ : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
    return a >= b ? a - b : a + q_ - b;
  }
  std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : q_ - a; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    return reduce(uint128_t{a} * b);
  }
  std::uint64_t pow(std::uint64_t base, std::uint64_t exp) const;
  // Inverse of a nonzero residue.
  std::uint64_t inv(std::uint64_t a) const;
  // Signed value to residue.
  std::uint64_t from_signed(std::int64_t v) const;

  // Shoup precomputation floor(w * 2^64 / q) for a fixed multiplicand w < q.
  std::uint64_t shoup(std::uint64_t w) const {
    return static_cast<std::uint64_t>((uint128_t{w} << 64) / q_);
  }
  std::uint64_t mul_shoup(std::uint64_t x, std::uint64_t w, std::uint64_t w_shoup) const {
    auto hi = static_cast<std::uint64_t>((uint128_t{x} * w_shoup) >> 64);
    std::uint64_t r = x * w - hi * q_;
    return r >= q_ ? r - q_ : r;
  }

 private:
  std::uint64_t q_ = 0;
  int bits_ = 0;
  std::uint64_t ratio_hi_ = 0;
  std::uint64_t ratio_lo_ = 0;
};

}  // namespace hesearch::ckks

#endif  // HESEARCH_CKKS_MODULUS_H_
