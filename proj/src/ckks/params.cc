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

#include "hesearch/ckks/params.h"

#include <bit>
#include <cmath>
#include <set>

#include "hesearch/ckks/modulus.h"
#include "hesearch/error.h"

namespace hesearch::ckks {
namespace {

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t n) {
  uint128_t result = 1;
  uint128_t b = base % n;
  while (exp != 0) {
    if (exp & 1) result = (result * b) % n;
    b = (b * b) % n;
    exp >>= 1;
  }
  return static_cast<std::uint64_t>(result);
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull,
                          37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These bases are a deterministic witness set for all 64-bit n.
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull,
                          37ull}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = static_cast<std::uint64_t>((uint128_t{x} * x) % n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

int binomial_width(double stddev) {
  return static_cast<int>(std::ceil(2.0 * stddev * stddev));
}

std::vector<std::uint64_t> ntt_primes(std::size_t n, const std::vector<int>& bits) {
  const std::uint64_t step = 2 * static_cast<std::uint64_t>(n);
  std::set<std::uint64_t> used;
  std::vector<std::uint64_t> out;
  for (int b : bits) {
    if (b < 3 || b > Modulus::kMaxBits) {
      throw Error(ErrorCode::kInvalidParams, "prime size must be in [3, 61] bits");
    }
    const std::uint64_t top = std::uint64_t{1} << b;
    if (top <= step) throw Error(ErrorCode::kInvalidParams, "prime too small for ring degree");
    std::uint64_t candidate = top - step + 1;
    const std::uint64_t floor = std::uint64_t{1} << (b - 1);
    while (candidate > floor && (used.count(candidate) != 0 || !is_prime(candidate))) {
      candidate -= step;
    }
    if (candidate <= floor) {
      throw Error(ErrorCode::kInvalidParams, "ran out of " + std::to_string(b) + "-bit primes");
    }
    used.insert(candidate);
    out.push_back(candidate);
  }
  return out;
}

CkksParams make_params(std::string name, std::size_t ring_degree, std::size_t depth,
                       int base_bits, int scale_bits) {
  CkksParams p;
  p.name = std::move(name);
  p.ring_degree = ring_degree;
  std::vector<int> bits{base_bits};
  bits.insert(bits.end(), depth, scale_bits);
  p.moduli = ntt_primes(ring_degree, bits);
  p.scale = std::ldexp(1.0, scale_bits);
  return p;
}

void validate(const CkksParams& p) {
  if (p.ring_degree < 2 || !std::has_single_bit(p.ring_degree)) {
    throw Error(ErrorCode::kInvalidParams, "ring degree must be a power of two");
  }
  if (p.moduli.empty()) throw Error(ErrorCode::kInvalidParams, "modulus chain is empty");
  if (!(p.scale > 1.0) || !std::isfinite(p.scale)) {
    throw Error(ErrorCode::kInvalidParams, "scale must be finite and above 1");
  }
  if (!(p.noise_stddev > 0.0) || !std::isfinite(p.noise_stddev)) {
    throw Error(ErrorCode::kInvalidParams, "noise stddev must be positive");
  }
  if (p.decomposition_bits < 1 || p.decomposition_bits > 60) {
    throw Error(ErrorCode::kInvalidParams, "decomposition bits must be in [1, 60]");
  }
  std::set<std::uint64_t> seen;
  for (std::size_t i = 0; i < p.moduli.size(); ++i) {
    std::uint64_t q = p.moduli[i];
    if (!seen.insert(q).second) throw Error(ErrorCode::kInvalidParams, "duplicate prime");
    if (!is_prime(q) || std::bit_width(q) > Modulus::kMaxBits) {
      throw Error(ErrorCode::kInvalidParams, std::to_string(q) + " is not a usable prime");
    }
    if ((q - 1) % (2 * p.ring_degree) != 0) {
      throw Error(ErrorCode::kInvalidParams,
                  std::to_string(q) + " is not 1 mod 2N; the scheme needs NTT primes");
    }
    if (i >= 1) {
      double ratio = static_cast<double>(q) / p.scale;
      if (ratio < 0.5 || ratio > 2.0) {
        throw Error(ErrorCode::kInvalidParams,
                    "rescaling prime " + std::to_string(q) + " is not within 2x of the scale");
      }
    }
  }
}

}  // namespace hesearch::ckks
