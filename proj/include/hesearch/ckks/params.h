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

#ifndef HESEARCH_CKKS_PARAMS_H_
#define HESEARCH_CKKS_PARAMS_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace hesearch::ckks {

// Absolute decryption error budgets for a parameter set. All comparisons
// against these are configuration, not constants baked into callers.
struct ErrorBounds {
  double enc = 1e-6;
  double add = 1e-6;
  double mul = 1e-4;
  double relin = 1e-6;
};

// Parameters of the coefficient-encoded leveled scheme.
//
// `moduli[0]` is the base prime that survives every rescale; `moduli[1..L]`
// are the rescaling primes, each close to `scale`. Ciphertexts at level l
// live modulo q_0 * ... * q_l.
struct CkksParams {
  std::string name = "custom";
  std::size_t ring_degree = 0;
  std::vector<std::uint64_t> moduli;
  double scale = 0x1p40;
  double noise_stddev = 3.2;
  // Relinearization digit width in bits.
  int decomposition_bits = 20;
  ErrorBounds bounds;
};

// Number of binomial coin pairs used to approximate a discrete Gaussian of
// the given standard deviation (variance of the centered binomial is k / 2).
int binomial_width(double stddev);

// Largest distinct primes below 2^bits[i] congruent to 1 mod 2n, in the order
// requested. Deterministic.
std::vector<std::uint64_t> ntt_primes(std::size_t n, const std::vector<int>& bits);

// Builds params with a 60-bit base prime and `depth` rescaling primes of
// `scale_bits` bits each.
CkksParams make_params(std::string name, std::size_t ring_degree, std::size_t depth,
                       int base_bits = 60, int scale_bits = 40);

// Throws Error(kInvalidParams) when the parameter set is unusable.
void validate(const CkksParams& params);

bool is_prime(std::uint64_t n);

}  // namespace hesearch::ckks

#endif  // HESEARCH_CKKS_PARAMS_H_
