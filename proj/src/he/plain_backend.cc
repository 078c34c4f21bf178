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

#include "hesearch/he/plain_backend.h"

#include <cmath>
#include <limits>

#include "hesearch/error.h"
#include "hesearch/random.h"

namespace hesearch::he {
namespace {

// Beyond this exponent gap the smaller operand cannot change a rounded
// double difference.
constexpr std::int64_t kNegligibleGap = 60;

struct NonceKeyBody final : Body {
  std::array<std::uint8_t, PlainBackend::kNonceBytes> nonce{};
  Bytes serialize() const override { return Bytes(nonce.begin(), nonce.end()); }
};

std::shared_ptr<const Body> parse_nonce_key(ByteSpan bytes) {
  if (bytes.size() != PlainBackend::kNonceBytes) {
    throw Error(ErrorCode::kMalformed, "plain key must be 16 bytes");
  }
  auto body = std::make_shared<NonceKeyBody>();
  std::copy(bytes.begin(), bytes.end(), body->nonce.begin());
  return body;
}

Prng& thread_prng() {
  thread_local Prng prng = Prng::from_entropy();
  return prng;
}

}  // namespace

WideExpReal WideExpReal::normalized(double mantissa, std::int64_t exponent) {
  WideExpReal r;
  if (mantissa == 0.0) return r;
  int shift = 0;
  r.mantissa_ = std::frexp(mantissa, &shift);
  r.exponent_ = exponent + shift;
  return r;
}

WideExpReal WideExpReal::from_double(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::kOutOfRange, "value is not finite");
  return normalized(v, 0);
}

WideExpReal WideExpReal::from_parts(double mantissa, std::int64_t exponent) {
  double m = std::fabs(mantissa);
  if (!(mantissa == 0.0 || (m >= 0.5 && m < 1.0))) {
    throw Error(ErrorCode::kMalformed, "mantissa outside [0.5, 1)");
  }
  WideExpReal r;
  r.mantissa_ = mantissa;
  r.exponent_ = mantissa == 0.0 ? 0 : exponent;
  return r;
}

double WideExpReal::to_double() const {
  if (mantissa_ == 0.0) return 0.0;
  if (exponent_ > 2000) return std::copysign(std::numeric_limits<double>::infinity(), mantissa_);
  double tiny = std::copysign(std::numeric_limits<double>::denorm_min(), mantissa_);
  if (exponent_ < -2000) return tiny;
  double v = std::ldexp(mantissa_, static_cast<int>(exponent_));
  return v == 0.0 ? tiny : v;
}

WideExpReal operator*(const WideExpReal& a, const WideExpReal& b) {
  return WideExpReal::normalized(a.mantissa_ * b.mantissa_, a.exponent_ + b.exponent_);
}

WideExpReal operator-(const WideExpReal& a, const WideExpReal& b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return WideExpReal::normalized(-b.mantissa_, b.exponent_);
  if (a.exponent_ >= b.exponent_) {
    std::int64_t gap = a.exponent_ - b.exponent_;
    if (gap > kNegligibleGap) return a;
    double r = a.mantissa_ - std::ldexp(b.mantissa_, -static_cast<int>(gap));
    return WideExpReal::normalized(r, a.exponent_);
  }
  std::int64_t gap = b.exponent_ - a.exponent_;
  if (gap > kNegligibleGap) return WideExpReal::normalized(-b.mantissa_, b.exponent_);
  double r = std::ldexp(a.mantissa_, -static_cast<int>(gap)) - b.mantissa_;
  return WideExpReal::normalized(r, b.exponent_);
}

Bytes PlainBackend::CiphertextBody::serialize() const {
  ByteWriter w;
  w.f64(value.mantissa());
  w.u64(static_cast<std::uint64_t>(value.exponent()));
  w.raw(nonce);
  return std::move(w).take();
}

PlainBackend::PlainBackend(SchemeParams params) : Backend(std::move(params)) {
  if (this->params().backend != BackendTag::kPlain) {
    throw Error(ErrorCode::kInvalidParams, "plain backend given non-plain params");
  }
}

SchemeParams PlainBackend::default_params() {
  SchemeParams p;
  p.backend = BackendTag::kPlain;
  p.max_depth = kUnboundedDepth;
  return p;
}

Ciphertext PlainBackend::make(WideExpReal value) const {
  auto body = std::make_shared<CiphertextBody>();
  body->value = value;
  thread_prng().fill(body->nonce);
  return Ciphertext(BackendTag::kPlain, kUnboundedDepth, 1.0, std::move(body));
}

WideExpReal PlainBackend::peek(const Ciphertext& c) {
  if (c.empty() || c.backend() != BackendTag::kPlain) {
    throw Error(ErrorCode::kTagMismatch, "not a plain ciphertext");
  }
  return c.body<CiphertextBody>().value;
}

KeyPair PlainBackend::do_keygen(std::uint64_t seed) const {
  Prng prng = Prng::from_seed(seed, "plain-keygen");
  auto make_key = [&prng] {
    auto body = std::make_shared<NonceKeyBody>();
    prng.fill(body->nonce);
    return body;
  };
  KeyPair keys;
  keys.public_key = PublicKey(params_id(), make_key());
  keys.secret_key = SecretKey(params_id(), make_key());
  keys.relin_key = RelinKey(params_id(), make_key());
  return keys;
}

Ciphertext PlainBackend::do_encrypt(const PublicKey&, double m) const {
  return make(WideExpReal::from_double(m));
}

double PlainBackend::do_decrypt(const SecretKey&, const Ciphertext& c) const {
  return c.body<CiphertextBody>().value.to_double();
}

Ciphertext PlainBackend::do_hsub(const Ciphertext& a, const Ciphertext& b) const {
  return make(peek(a) - peek(b));
}

Ciphertext PlainBackend::do_hmul(const Ciphertext& a, const Ciphertext& b,
                                 const RelinKey&) const {
  return make(peek(a) * peek(b));
}

Ciphertext PlainBackend::do_hmul_plain(const Ciphertext& a, double k) const {
  return make(peek(a) * WideExpReal::from_double(k));
}

Ciphertext PlainBackend::parse_ciphertext(std::uint16_t, double, ByteSpan payload) const {
  ByteReader r(payload);
  double mantissa = r.f64();
  auto exponent = static_cast<std::int64_t>(r.u64());
  auto body = std::make_shared<CiphertextBody>();
  body->value = WideExpReal::from_parts(mantissa, exponent);
  ByteSpan nonce = r.raw(kNonceBytes);
  std::copy(nonce.begin(), nonce.end(), body->nonce.begin());
  r.expect_done("plain ciphertext payload");
  return Ciphertext(BackendTag::kPlain, kUnboundedDepth, 1.0, std::move(body));
}

PublicKey PlainBackend::parse_public_key(ByteSpan bytes) const {
  return PublicKey(params_id(), parse_nonce_key(bytes));
}

SecretKey PlainBackend::parse_secret_key(ByteSpan bytes) const {
  return SecretKey(params_id(), parse_nonce_key(bytes));
}

RelinKey PlainBackend::parse_relin_key(ByteSpan bytes) const {
  return RelinKey(params_id(), parse_nonce_key(bytes));
}

}  // namespace hesearch::he
