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

#include "hesearch/ckks/ring.h"

#include <algorithm>
#include <bit>
#include <set>

#include "hesearch/ckks/params.h"
#include "hesearch/error.h"

namespace hesearch::ckks {
namespace {

constexpr std::size_t kMaxModulusBits = 640;

}  // namespace

RnsContext::RnsContext(std::size_t degree, std::vector<std::uint64_t> moduli)
    : degree_(degree) {
  if (degree < 2 || !std::has_single_bit(degree) || degree > (1u << 17)) {
    throw Error(ErrorCode::kInvalidParams, "ring degree must be a power of two in [2, 2^17]");
  }
  if (moduli.empty()) throw Error(ErrorCode::kInvalidParams, "modulus chain is empty");
  std::set<std::uint64_t> seen;
  std::size_t total_bits = 0;
  for (std::uint64_t q : moduli) {
    if (!seen.insert(q).second) {
      throw Error(ErrorCode::kInvalidParams, "duplicate modulus " + std::to_string(q));
    }
    if (!is_prime(q)) throw Error(ErrorCode::kInvalidParams, std::to_string(q) + " is not prime");
    moduli_.emplace_back(q);
    total_bits += static_cast<std::size_t>(moduli_.back().bits());
  }
  if (total_bits > kMaxModulusBits) {
    throw Error(ErrorCode::kInvalidParams, "modulus chain exceeds 640 bits");
  }

  for (const Modulus& m : moduli_) {
    if ((m.value() - 1) % (2 * degree) == 0) {
      ntt_.emplace_back(std::in_place, degree, m);
    } else {
      ntt_.emplace_back(std::nullopt);
      ntt_enabled_ = false;
    }
  }

  levels_.resize(moduli_.size());
  for (std::size_t l = 0; l < moduli_.size(); ++l) {
    Level& level = levels_[l];
    level.product = WideUint(1);
    for (std::size_t j = 0; j <= l; ++j) {
      WideUint next;
      next.add_product(level.product, moduli_[j].value());
      level.product = next;
    }
    level.half = level.product.shifted_right_one();
    for (std::size_t j = 0; j <= l; ++j) {
      WideUint punctured(1);
      for (std::size_t i = 0; i <= l; ++i) {
        if (i == j) continue;
        WideUint next;
        next.add_product(punctured, moduli_[i].value());
        punctured = next;
      }
      level.punctured_inv.push_back(moduli_[j].inv(punctured.mod(moduli_[j].value())));
      level.punctured.push_back(punctured);
    }
    for (std::size_t j = 0; j < l; ++j) {
      level.drop_inv.push_back(moduli_[j].inv(moduli_[l].value() % moduli_[j].value()));
    }
  }
}

const NttTables& RnsContext::ntt(std::size_t j) const {
  if (!ntt_[j]) {
    throw Error(ErrorCode::kInvalidParams,
                "modulus " + std::to_string(moduli_[j].value()) + " does not support the NTT");
  }
  return *ntt_[j];
}

WideUint RnsContext::reconstruct(std::size_t level,
                                 std::span<const std::uint64_t> residues) const {
  const Level& lv = levels_[level];
  WideUint x;
  for (std::size_t j = 0; j <= level; ++j) {
    x.add_product(lv.punctured[j], moduli_[j].mul(residues[j], lv.punctured_inv[j]));
  }
  while (x >= lv.product) x.subtract(lv.product);
  return x;
}

RingElem::RingElem(std::shared_ptr<const RnsContext> context, std::size_t level, Form form)
    : context_(std::move(context)), level_(level), form_(form) {
  if (level_ > context_->max_level()) {
    throw Error(ErrorCode::kInvalidArgument, "level above the modulus chain");
  }
  data_.assign((level_ + 1) * context_->degree(), 0);
}

RingElem RingElem::from_signed(std::shared_ptr<const RnsContext> context, std::size_t level,
                               std::span<const std::int64_t> coefficients) {
  RingElem out(std::move(context), level, Form::kCoefficient);
  if (coefficients.size() > out.degree()) {
    throw Error(ErrorCode::kInvalidArgument, "more coefficients than the ring degree");
  }
  for (std::size_t j = 0; j <= level; ++j) {
    const Modulus& q = out.context_->modulus(j);
    auto r = out.row(j);
    for (std::size_t i = 0; i < coefficients.size(); ++i) r[i] = q.from_signed(coefficients[i]);
  }
  return out;
}

void RingElem::to_evaluation() {
  if (form_ == Form::kEvaluation) return;
  for (std::size_t j = 0; j <= level_; ++j) context_->ntt(j).forward(row(j));
  form_ = Form::kEvaluation;
}

void RingElem::to_coefficient() {
  if (form_ == Form::kCoefficient) return;
  for (std::size_t j = 0; j <= level_; ++j) context_->ntt(j).inverse(row(j));
  form_ = Form::kCoefficient;
}

RingElem RingElem::in_form(Form form) const {
  RingElem out = *this;
  if (form == Form::kEvaluation) {
    out.to_evaluation();
  } else {
    out.to_coefficient();
  }
  return out;
}

void RingElem::drop_to(std::size_t level) {
  if (level > level_) throw Error(ErrorCode::kInvalidArgument, "cannot raise a level");
  level_ = level;
  data_.resize((level_ + 1) * degree());
}

void RingElem::check_compatible(const RingElem& other) const {
  if (context_ != other.context_) {
    throw Error(ErrorCode::kParamsMismatch, "ring elements from different contexts");
  }
  if (level_ != other.level_) {
    throw Error(ErrorCode::kLevelMismatch, "ring elements at levels " + std::to_string(level_) +
                                               " and " + std::to_string(other.level_));
  }
  if (form_ != other.form_) {
    throw Error(ErrorCode::kInvalidArgument, "ring elements in different forms");
  }
}

RingElem& RingElem::operator+=(const RingElem& other) {
  check_compatible(other);
  for (std::size_t j = 0; j <= level_; ++j) {
    const Modulus& q = context_->modulus(j);
    auto a = row(j);
    auto b = other.row(j);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = q.add(a[i], b[i]);
  }
  return *this;
}

RingElem& RingElem::operator-=(const RingElem& other) {
  check_compatible(other);
  for (std::size_t j = 0; j <= level_; ++j) {
    const Modulus& q = context_->modulus(j);
    auto a = row(j);
    auto b = other.row(j);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = q.sub(a[i], b[i]);
  }
  return *this;
}

RingElem& RingElem::operator*=(const RingElem& other) {
  check_compatible(other);
  if (form_ != Form::kEvaluation) {
    throw Error(ErrorCode::kInvalidArgument, "pointwise product needs evaluation form");
  }
  for (std::size_t j = 0; j <= level_; ++j) {
    const Modulus& q = context_->modulus(j);
    auto a = row(j);
    auto b = other.row(j);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = q.mul(a[i], b[i]);
  }
  return *this;
}

void RingElem::negate() {
  for (std::size_t j = 0; j <= level_; ++j) {
    const Modulus& q = context_->modulus(j);
    for (auto& v : row(j)) v = q.neg(v);
  }
}

void RingElem::multiply_scalar(std::span<const std::uint64_t> residues_per_prime) {
  for (std::size_t j = 0; j <= level_; ++j) {
    const Modulus& q = context_->modulus(j);
    const std::uint64_t k = residues_per_prime[j];
    const std::uint64_t k_shoup = q.shoup(k);
    for (auto& v : row(j)) v = q.mul_shoup(v, k, k_shoup);
  }
}

std::vector<std::uint64_t> RingElem::coefficient_residues(std::size_t i) const {
  std::vector<std::uint64_t> out(level_ + 1);
  for (std::size_t j = 0; j <= level_; ++j) out[j] = row(j)[i];
  return out;
}

std::pair<bool, WideUint> RingElem::centered_coefficient(std::size_t i) const {
  if (form_ != Form::kCoefficient) {
    throw Error(ErrorCode::kInvalidArgument, "coefficient access needs coefficient form");
  }
  WideUint x = context_->reconstruct(level_, coefficient_residues(i));
  if (x > context_->half_product(level_)) {
    WideUint mag = context_->product(level_);
    mag.subtract(x);
    return {true, mag};
  }
  return {false, x};
}

bool operator==(const RingElem& a, const RingElem& b) {
  return a.context_ == b.context_ && a.level_ == b.level_ && a.form_ == b.form_ &&
         a.data_ == b.data_;
}

RingElem operator+(RingElem a, const RingElem& b) { return a += b; }
RingElem operator-(RingElem a, const RingElem& b) { return a -= b; }

RingElem poly_mul(const RingElem& a, const RingElem& b) {
  if (a.level() != b.level()) {
    throw Error(ErrorCode::kLevelMismatch, "poly_mul operands at different levels");
  }
  if (!a.context()->ntt_enabled()) return poly_mul_schoolbook(a, b);
  RingElem x = a.in_form(Form::kEvaluation);
  x *= b.in_form(Form::kEvaluation);
  x.to_coefficient();
  return x;
}

RingElem poly_mul_schoolbook(const RingElem& a_in, const RingElem& b_in) {
  if (a_in.level() != b_in.level()) {
    throw Error(ErrorCode::kLevelMismatch, "poly_mul operands at different levels");
  }
  if (a_in.context() != b_in.context()) {
    throw Error(ErrorCode::kParamsMismatch, "ring elements from different contexts");
  }
  const RingElem a = a_in.in_form(Form::kCoefficient);
  const RingElem b = b_in.in_form(Form::kCoefficient);
  const std::size_t n = a.degree();
  RingElem out(a.context(), a.level(), Form::kCoefficient);
  for (std::size_t j = 0; j <= a.level(); ++j) {
    const Modulus& q = a.context()->modulus(j);
    auto x = a.row(j);
    auto y = b.row(j);
    auto z = out.row(j);
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] == 0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        std::uint64_t p = q.mul(x[i], y[k]);
        std::size_t idx = i + k;
        if (idx < n) {
          z[idx] = q.add(z[idx], p);
        } else {
          z[idx - n] = q.sub(z[idx - n], p);  // X^N = -1
        }
      }
    }
  }
  return out;
}

}  // namespace hesearch::ckks
