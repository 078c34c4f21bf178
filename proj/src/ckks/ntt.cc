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

#include "hesearch/ckks/ntt.h"

#include <bit>

#include "hesearch/error.h"

namespace hesearch::ckks {
namespace {

std::size_t reverse_bits(std::size_t x, int bits) {
  std::size_t r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

}  // namespace

std::uint64_t primitive_root_2n(std::size_t degree, const Modulus& modulus) {
  const std::uint64_t q = modulus.value();
  const std::uint64_t order = 2 * degree;
  if ((q - 1) % order != 0) {
    throw Error(ErrorCode::kInvalidParams,
                "modulus " + std::to_string(q) + " is not 1 mod " + std::to_string(order));
  }
  for (std::uint64_t g = 2; g < q; ++g) {
    std::uint64_t candidate = modulus.pow(g, (q - 1) / order);
    // Order exactly 2N iff candidate^N == -1.
    if (modulus.pow(candidate, degree) == q - 1) return candidate;
  }
  throw Error(ErrorCode::kInvalidParams, "no primitive 2N-th root");
}

NttTables::NttTables(std::size_t degree, const Modulus& modulus)
    : degree_(degree), modulus_(modulus) {
  if (degree < 2 || !std::has_single_bit(degree)) {
    throw Error(ErrorCode::kInvalidParams, "ring degree must be a power of two >= 2");
  }
  root_ = primitive_root_2n(degree, modulus);
  const int log_n = std::countr_zero(degree);
  const std::uint64_t inv_root = modulus.inv(root_);
  roots_.resize(degree);
  inv_roots_.resize(degree);
  roots_shoup_.resize(degree);
  inv_roots_shoup_.resize(degree);
  std::uint64_t power = 1;
  std::uint64_t inv_power = 1;
  for (std::size_t i = 0; i < degree; ++i) {
    std::size_t r = reverse_bits(i, log_n);
    roots_[r] = power;
    inv_roots_[r] = inv_power;
    power = modulus.mul(power, root_);
    inv_power = modulus.mul(inv_power, inv_root);
  }
  for (std::size_t i = 0; i < degree; ++i) {
    roots_shoup_[i] = modulus.shoup(roots_[i]);
    inv_roots_shoup_[i] = modulus.shoup(inv_roots_[i]);
  }
  inv_degree_ = modulus.inv(degree % modulus.value());
  inv_degree_shoup_ = modulus.shoup(inv_degree_);
}

// Both transforms use lazy butterflies: intermediate values stay in [0, 4q)
// and are fully reduced once at the end. Requires q < 2^62.
void NttTables::forward(std::span<std::uint64_t> a) const {
  const std::uint64_t q = modulus_.value();
  const std::uint64_t two_q = 2 * q;
  std::size_t t = degree_;
  for (std::size_t m = 1; m < degree_; m <<= 1) {
    t >>= 1;
    for (std::size_t i = 0; i < m; ++i) {
      const std::uint64_t w = roots_[m + i];
      const std::uint64_t w_shoup = roots_shoup_[m + i];
      std::uint64_t* x = a.data() + 2 * i * t;
      std::uint64_t* y = x + t;
      for (std::size_t j = 0; j < t; ++j) {
        std::uint64_t u = x[j];
        u -= u >= two_q ? two_q : 0;
        auto hi = static_cast<std::uint64_t>((uint128_t{y[j]} * w_shoup) >> 64);
        std::uint64_t v = y[j] * w - hi * q;
        x[j] = u + v;
        y[j] = u - v + two_q;
      }
    }
  }
  for (auto& v : a) {
    v -= v >= two_q ? two_q : 0;
    v -= v >= q ? q : 0;
  }
}

void NttTables::inverse(std::span<std::uint64_t> a) const {
  const std::uint64_t q = modulus_.value();
  const std::uint64_t two_q = 2 * q;
  std::size_t t = 1;
  for (std::size_t m = degree_; m > 1; m >>= 1) {
    const std::size_t h = m >> 1;
    std::size_t j1 = 0;
    for (std::size_t i = 0; i < h; ++i) {
      const std::uint64_t w = inv_roots_[h + i];
      const std::uint64_t w_shoup = inv_roots_shoup_[h + i];
      std::uint64_t* x = a.data() + j1;
      std::uint64_t* y = x + t;
      for (std::size_t j = 0; j < t; ++j) {
        const std::uint64_t u = x[j];
        const std::uint64_t v = y[j];
        std::uint64_t s = u + v;
        s -= s >= two_q ? two_q : 0;
        const std::uint64_t d = u - v + two_q;
        auto hi = static_cast<std::uint64_t>((uint128_t{d} * w_shoup) >> 64);
        x[j] = s;
        y[j] = d * w - hi * q;
      }
      j1 += 2 * t;
    }
    t <<= 1;
  }
  for (auto& v : a) v = modulus_.mul_shoup(v, inv_degree_, inv_degree_shoup_);
}

std::uint64_t NttTables::constant_term(std::span<const std::uint64_t> values) const {
  // Sum of all evaluations at the odd powers of the root is N * a_0.
  uint128_t sum = 0;
  for (std::uint64_t v : values) sum += v;
  return modulus_.mul(modulus_.reduce(sum), inv_degree_);
}

}  // namespace hesearch::ckks
