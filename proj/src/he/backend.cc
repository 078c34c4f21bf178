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

#include "hesearch/he/backend.h"

#include <cmath>

#include "hesearch/error.h"

namespace hesearch::he {

std::string_view backend_name(BackendTag tag) {
  switch (tag) {
    case BackendTag::kPlain:
      return "plain";
    case BackendTag::kCkks:
      return "ckks";
  }
  return "unknown";
}

std::string SchemeParams::params_id() const {
  if (backend == BackendTag::kPlain) return "plain";
  if (!ckks) return "ckks-invalid";
  if (ckks->name != "custom") return "ckks-" + ckks->name;
  return "ckks-custom-n" + std::to_string(ckks->ring_degree) + "-l" +
         std::to_string(ckks->moduli.size()) + "-d" + std::to_string(max_depth);
}

Backend::Backend(SchemeParams params)
    : params_(std::move(params)), params_id_(params_.params_id()) {
  if (params_.max_depth < 1) {
    throw Error(ErrorCode::kInvalidParams, "max-depth must be at least 1");
  }
  if (!(params_.plaintext_bound > 0) || !std::isfinite(params_.plaintext_bound)) {
    throw Error(ErrorCode::kInvalidParams, "plaintext bound must be positive and finite");
  }
}

void Backend::check_ciphertext(const Ciphertext& c) const {
  if (c.empty()) throw Error(ErrorCode::kInvalidArgument, "empty ciphertext");
  if (c.backend() != tag()) {
    throw Error(ErrorCode::kTagMismatch,
                std::string(backend_name(c.backend())) + " ciphertext given to " +
                    std::string(backend_name(tag())) + " backend");
  }
}

template <typename K>
void Backend::check_key(const K& key, std::string_view what) const {
  if (key.empty()) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " is empty");
  if (key.params_id() != params_id_) {
    throw Error(ErrorCode::kParamsMismatch, std::string(what) + " is for '" +
                                                key.params_id() + "', backend is '" +
                                                params_id_ + "'");
  }
}

KeyPair Backend::keygen(std::uint64_t seed) const { return do_keygen(seed); }

Ciphertext Backend::encrypt(const PublicKey& pk, double m) const {
  check_key(pk, "public key");
  if (!std::isfinite(m)) throw Error(ErrorCode::kOutOfRange, "plaintext is not finite");
  if (std::fabs(m) > params_.plaintext_bound) {
    throw Error(ErrorCode::kOutOfRange, "plaintext magnitude exceeds bound " +
                                            std::to_string(params_.plaintext_bound));
  }
  Ciphertext result = do_encrypt(pk, m);
  encrypt_count_.fetch_add(1, std::memory_order_relaxed);
  return result;
}

double Backend::decrypt(const SecretKey& sk, const Ciphertext& c) const {
  check_key(sk, "secret key");
  check_ciphertext(c);
  double result = do_decrypt(sk, c);
  decrypt_count_.fetch_add(1, std::memory_order_relaxed);
  return result;
}

Ciphertext Backend::hsub(const Ciphertext& a, const Ciphertext& b) const {
  check_ciphertext(a);
  check_ciphertext(b);
  Ciphertext result = do_hsub(a, b);
  hsub_count_.fetch_add(1, std::memory_order_relaxed);
  return result;
}

Ciphertext Backend::hmul(const Ciphertext& a, const Ciphertext& b,
                         const RelinKey& rlk) const {
  check_ciphertext(a);
  check_ciphertext(b);
  check_key(rlk, "relinearization key");
  Ciphertext result = do_hmul(a, b, rlk);
  hmul_count_.fetch_add(1, std::memory_order_relaxed);
  return result;
}

Ciphertext Backend::hmul_plain(const Ciphertext& a, double k) const {
  check_ciphertext(a);
  if (!std::isfinite(k)) throw Error(ErrorCode::kInvalidArgument, "scalar is not finite");
  if (k == 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "scalar 0 would erase the zero/nonzero signal");
  }
  Ciphertext result = do_hmul_plain(a, k);
  hmul_plain_count_.fetch_add(1, std::memory_order_relaxed);
  return result;
}

OpCounts Backend::counts() const {
  OpCounts c;
  c.encrypt = encrypt_count_.load(std::memory_order_relaxed);
  c.decrypt = decrypt_count_.load(std::memory_order_relaxed);
  c.hsub = hsub_count_.load(std::memory_order_relaxed);
  c.hmul = hmul_count_.load(std::memory_order_relaxed);
  c.hmul_plain = hmul_plain_count_.load(std::memory_order_relaxed);
  return c;
}

void Backend::reset_counts() {
  encrypt_count_ = 0;
  decrypt_count_ = 0;
  hsub_count_ = 0;
  hmul_count_ = 0;
  hmul_plain_count_ = 0;
}

}  // namespace hesearch::he
