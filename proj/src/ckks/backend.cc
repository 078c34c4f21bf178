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

#include "hesearch/ckks/backend.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "hesearch/error.h"
#include "hesearch/random.h"

namespace hesearch::ckks {
namespace {

struct SecretKeyBody final : he::Body {
  std::shared_ptr<const CkksContext> context;
  SecretKeyData key;
  Bytes serialize() const override { return serialize_secret_key(*context, key); }
};

struct PublicKeyBody final : he::Body {
  std::shared_ptr<const CkksContext> context;
  PublicKeyData key;
  Bytes serialize() const override { return serialize_public_key(*context, key); }
};

struct RelinKeyBody final : he::Body {
  std::shared_ptr<const CkksContext> context;
  RelinKeyData key;
  Bytes serialize() const override { return serialize_relin_key(*context, key); }
};

Prng& encryption_prng() {
  thread_local Prng prng = Prng::from_entropy();
  return prng;
}

// Equal parameters share one context, so keys and ciphertexts move freely
// between backend instances built from the same parameters.
std::shared_ptr<const CkksContext> make_context(const he::SchemeParams& params) {
  if (params.backend != he::BackendTag::kCkks || !params.ckks) {
    throw Error(ErrorCode::kInvalidParams, "ckks backend needs ckks parameters");
  }
  const CkksParams& p = *params.ckks;
  ByteWriter key;
  key.u64(p.ring_degree);
  for (std::uint64_t q : p.moduli) key.u64(q);
  key.f64(p.scale);
  key.f64(p.noise_stddev);
  key.u32(static_cast<std::uint32_t>(p.decomposition_bits));
  key.u32(params.max_depth);
  const std::string cache_key(key.bytes().begin(), key.bytes().end());

  static std::mutex mutex;
  static std::map<std::string, std::weak_ptr<const CkksContext>> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(cache_key); it != cache.end()) {
    if (auto ctx = it->second.lock()) return ctx;
  }
  auto ctx = CkksContext::create(p, params.max_depth);
  cache[cache_key] = ctx;
  return ctx;
}

// Parse failures of key blobs mean the file was made for other parameters.
template <typename F>
auto parse_or_mismatch(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kMalformed) {
      throw Error(ErrorCode::kParamsMismatch, std::string("key does not fit parameters: ") +
                                                  e.what());
    }
    throw;
  }
}

}  // namespace

double epsilon_depth(std::size_t depth) {
  // About 100 times the worst error observed on the desk presets (below
  // 5e-9 up to depth 8), doubling per level.
  return std::ldexp(1e-8, static_cast<int>(std::min<std::size_t>(depth, 30)));
}

CkksBackend::CkksBackend(he::SchemeParams params)
    : Backend(std::move(params)), context_(make_context(this->params())) {}

he::Ciphertext CkksBackend::wrap(CkksCiphertext c) const {
  auto body = std::make_shared<CiphertextBody>();
  body->context = context_;
  const auto level = static_cast<std::uint32_t>(c.level);
  const double scale = c.scale;
  body->value = std::move(c);
  return he::Ciphertext(he::BackendTag::kCkks, level, scale, std::move(body));
}

const CkksCiphertext& CkksBackend::unwrap(const he::Ciphertext& c) {
  return c.body<CiphertextBody>().value;
}

he::KeyPair CkksBackend::do_keygen(std::uint64_t seed) const {
  Prng prng = Prng::from_seed(seed, "ckks-keygen");
  KeyMaterial keys = generate_keys(*context_, prng);
  auto sk = std::make_shared<SecretKeyBody>();
  sk->context = context_;
  sk->key = std::move(keys.secret);
  auto pk = std::make_shared<PublicKeyBody>();
  pk->context = context_;
  pk->key = std::move(keys.public_key);
  auto rlk = std::make_shared<RelinKeyBody>();
  rlk->context = context_;
  rlk->key = std::move(keys.relin);
  he::KeyPair out;
  out.public_key = he::PublicKey(params_id(), std::move(pk));
  out.secret_key = he::SecretKey(params_id(), std::move(sk));
  out.relin_key = he::RelinKey(params_id(), std::move(rlk));
  return out;
}

he::Ciphertext CkksBackend::do_encrypt(const he::PublicKey& pk, double m) const {
  return wrap(ckks::encrypt(*context_, pk.body<PublicKeyBody>().key, m, encryption_prng()));
}

double CkksBackend::do_decrypt(const he::SecretKey& sk, const he::Ciphertext& c) const {
  return ckks::decrypt(*context_, sk.body<SecretKeyBody>().key, unwrap(c));
}

he::Ciphertext CkksBackend::do_hsub(const he::Ciphertext& a, const he::Ciphertext& b) const {
  return wrap(subtract(*context_, unwrap(a), unwrap(b), params().strict_levels));
}

he::Ciphertext CkksBackend::do_hmul(const he::Ciphertext& a, const he::Ciphertext& b,
                                    const he::RelinKey& rlk) const {
  return wrap(multiply(*context_, unwrap(a), unwrap(b), rlk.body<RelinKeyBody>().key,
                       params().strict_levels));
}

he::Ciphertext CkksBackend::do_hmul_plain(const he::Ciphertext& a, double k) const {
  return wrap(multiply_scalar(*context_, unwrap(a), k));
}

he::Ciphertext CkksBackend::parse_ciphertext(std::uint16_t level, double scale,
                                             ByteSpan payload) const {
  return wrap(parse_payload(*context_, level, scale, payload));
}

he::PublicKey CkksBackend::parse_public_key(ByteSpan bytes) const {
  auto body = std::make_shared<PublicKeyBody>();
  body->context = context_;
  body->key = parse_or_mismatch([&] { return ckks::parse_public_key(*context_, bytes); });
  return he::PublicKey(params_id(), std::move(body));
}

he::SecretKey CkksBackend::parse_secret_key(ByteSpan bytes) const {
  auto body = std::make_shared<SecretKeyBody>();
  body->context = context_;
  body->key = parse_or_mismatch([&] { return ckks::parse_secret_key(*context_, bytes); });
  return he::SecretKey(params_id(), std::move(body));
}

he::RelinKey CkksBackend::parse_relin_key(ByteSpan bytes) const {
  auto body = std::make_shared<RelinKeyBody>();
  body->context = context_;
  body->key = parse_or_mismatch([&] { return ckks::parse_relin_key(*context_, bytes); });
  return he::RelinKey(params_id(), std::move(body));
}

}  // namespace hesearch::ckks
