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

#ifndef HESEARCH_CKKS_RING_H_
#define HESEARCH_CKKS_RING_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hesearch/ckks/modulus.h"
#include "hesearch/ckks/ntt.h"
#include "hesearch/ckks/wide_uint.h"

namespace hesearch::ckks {

// A chain of primes q_0..q_L over Z[X]/(X^N + 1) together with everything
// derived from it: transform tables and CRT constants for every level.
// Immutable and shared read-only between threads.
class RnsContext {
 public:
  RnsContext(std::size_t degree, std::vector<std::uint64_t> moduli);

  std::size_t degree() const { return degree_; }
  std::size_t moduli_count() const { return moduli_.size(); }
  std::size_t max_level() const { return moduli_.size() - 1; }
  const Modulus& modulus(std::size_t j) const { return moduli_[j]; }
  // True when every prime supports the fast transform.
  bool ntt_enabled() const { return ntt_enabled_; }
  const NttTables& ntt(std::size_t j) const;

  // Product q_0 * ... * q_level and half of it (rounded down).
  const WideUint& product(std::size_t level) const { return levels_[level].product; }
  const WideUint& half_product(std::size_t level) const { return levels_[level].half; }
  // Bit width of the level product.
  std::size_t product_bits(std::size_t level) const { return product(level).bit_width(); }

  // q_level^{-1} mod q_j for j < level; used when dropping the top prime.
  std::uint64_t drop_inverse(std::size_t level, std::size_t j) const {
    return levels_[level].drop_inv[j];
  }

  // CRT: the unique x in [0, Q_level) with the given residues.
  WideUint reconstruct(std::size_t level, std::span<const std::uint64_t> residues) const;

 private:
  struct Level {
    WideUint product;
    WideUint half;
    std::vector<WideUint> punctured;        // Q_level / q_j
    std::vector<std::uint64_t> punctured_inv;  // (Q_level / q_j)^{-1} mod q_j
    std::vector<std::uint64_t> drop_inv;
  };

  std::size_t degree_;
  std::vector<Modulus> moduli_;
  std::vector<std::optional<NttTables>> ntt_;
  bool ntt_enabled_ = true;
  std::vector<Level> levels_;
};

enum class Form : std::uint8_t { kCoefficient, kEvaluation };

// Element of Z_{Q_level}[X]/(X^N + 1) stored as one residue polynomial per
// prime. In evaluation form each residue row holds the forward transform.
class RingElem {
 public:
  RingElem() = default;
  RingElem(std::shared_ptr<const RnsContext> context, std::size_t level, Form form);

  static RingElem from_signed(std::shared_ptr<const RnsContext> context, std::size_t level,
                              std::span<const std::int64_t> coefficients);

  const std::shared_ptr<const RnsContext>& context() const { return context_; }
  std::size_t degree() const { return context_->degree(); }
  std::size_t level() const { return level_; }
  Form form() const { return form_; }

  std::span<std::uint64_t> row(std::size_t j) {
    return {data_.data() + j * degree(), degree()};
  }
  std::span<const std::uint64_t> row(std::size_t j) const {
    return {data_.data() + j * degree(), degree()};
  }

  void to_evaluation();
  void to_coefficient();
  RingElem in_form(Form form) const;

  // Drops residue rows above `level`.
  void drop_to(std::size_t level);

  RingElem& operator+=(const RingElem& other);
  RingElem& operator-=(const RingElem& other);
  // Pointwise product; both operands must be in evaluation form.
  RingElem& operator*=(const RingElem& other);
  void negate();
  // Multiplies every residue by the residue of a signed integer constant.
  void multiply_scalar(std::span<const std::uint64_t> residues_per_prime);

  // Residues of coefficient i across the level's primes; coefficient form.
  std::vector<std::uint64_t> coefficient_residues(std::size_t i) const;
  // Centered lift of coefficient i into (-Q/2, Q/2]: returns (negative, |x|).
  std::pair<bool, WideUint> centered_coefficient(std::size_t i) const;

  friend bool operator==(const RingElem& a, const RingElem& b);

 private:
  void check_compatible(const RingElem& other) const;

  std::shared_ptr<const RnsContext> context_;
  std::size_t level_ = 0;
  Form form_ = Form::kCoefficient;
  std::vector<std::uint64_t> data_;
};

RingElem operator+(RingElem a, const RingElem& b);
RingElem operator-(RingElem a, const RingElem& b);

// Negacyclic product of two coefficient-form elements through the fast
// transform. Result is in coefficient form.
RingElem poly_mul(const RingElem& a, const RingElem& b);

// Reference O(N^2) negacyclic convolution per residue.
RingElem poly_mul_schoolbook(const RingElem& a, const RingElem& b);

}  // namespace hesearch::ckks

#endif  // HESEARCH_CKKS_RING_H_
