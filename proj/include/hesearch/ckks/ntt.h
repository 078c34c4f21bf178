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

#ifndef HESEARCH_CKKS_NTT_H_
#define HESEARCH_CKKS_NTT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hesearch/ckks/modulus.h"

namespace hesearch::ckks {

// Twiddle tables for the negacyclic number-theoretic transform over
// Z_q[X]/(X^N + 1). Requires q = 1 mod 2N. Forward output is in bit-reversed
// order; pointwise products of two forward transforms invert to the
// negacyclic convolution.
class NttTables {
 public:
  NttTables(std::size_t degree, const Modulus& modulus);

  std::size_t degree() const { return degree_; }
  const Modulus& modulus() const { return modulus_; }
  // Primitive 2N-th root of unity used for the tables.
  std::uint64_t root() const { return root_; }

  void forward(std::span<std::uint64_t> values) const;
  void inverse(std::span<std::uint64_t> values) const;

  // Coefficient 0 of the polynomial whose forward transform is `values`.
  std::uint64_t constant_term(std::span<const std::uint64_t> values) const;

 private:
  std::size_t degree_;
  Modulus modulus_;
  std::uint64_t root_ = 0;
  std::vector<std::uint64_t> roots_;
  std::vector<std::uint64_t> roots_shoup_;
  std::vector<std::uint64_t> inv_roots_;
  std::vector<std::uint64_t> inv_roots_shoup_;
  std::uint64_t inv_degree_ = 0;
  std::uint64_t inv_degree_shoup_ = 0;
};

// Smallest-generator primitive 2N-th root of unity mod q.
std::uint64_t primitive_root_2n(std::size_t degree, const Modulus& modulus);

}  // namespace hesearch::ckks

#endif  // HESEARCH_CKKS_NTT_H_
