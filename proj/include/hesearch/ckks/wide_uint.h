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

#ifndef HESEARCH_CKKS_WIDE_UINT_H_
#define HESEARCH_CKKS_WIDE_UINT_H_

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>

#include "hesearch/bytes.h"

namespace hesearch::ckks {

// Fixed-capacity unsigned integer (little-endian 64-bit limbs) for CRT
// reconstruction of residues modulo products of up to ~640 bits.
class WideUint {
 public:
  static constexpr std::size_t kLimbs = 12;

  WideUint() = default;
  explicit WideUint(std::uint64_t v) { limbs_[0] = v; }

  // Exact conversion of a nonnegative integral double.
  static WideUint from_double(double v);
  static WideUint from_bytes_be(ByteSpan bytes);

  std::uint64_t limb(std::size_t i) const { return limbs_[i]; }
  bool is_zero() const;
  std::size_t bit_width() const;

  // this += a * m; throws on overflow of the fixed capacity.
  void add_product(const WideUint& a, std::uint64_t m);
  // this -= b; requires this >= b.
  void subtract(const WideUint& b);
  WideUint shifted_right_one() const;
  std::uint64_t mod(std::uint64_t q) const;

  // Minimal big-endian encoding; zero encodes as no bytes.
  Bytes to_bytes_be() const;
  long double to_long_double() const;

  friend std::strong_ordering operator<=>(const WideUint& a, const WideUint& b);
  friend bool operator==(const WideUint& a, const WideUint& b) = default;

 private:
  std::array<std::uint64_t, kLimbs> limbs_{};
};

}  // namespace hesearch::ckks

#endif  // HESEARCH_CKKS_WIDE_UINT_H_
