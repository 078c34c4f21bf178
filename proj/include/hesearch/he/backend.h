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

#ifndef HESEARCH_HE_BACKEND_H_
#define HESEARCH_HE_BACKEND_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "hesearch/bytes.h"
#include "hesearch/ckks/params.h"

namespace hesearch::he {

enum class BackendTag : std::uint8_t { kPlain = 0, kCkks = 1 };

std::string_view backend_name(BackendTag tag);

// Depth reported for backends without a multiplicative budget.
inline constexpr std::uint32_t kUnboundedDepth = 1u << 30;
inline constexpr double kDefaultPlaintextBound = 0x1p20;

// Backend-private state carried by ciphertexts and keys.
class Body {
 public:
  virtual ~Body() = default;
  virtual Bytes serialize() const = 0;
};

// An encrypted real scalar. Immutable; copies share the backend state.
class Ciphertext {
 public:
  Ciphertext() = default;
  Ciphertext(BackendTag backend, std::uint32_t level, double scale,
             std::shared_ptr<const Body> body)
      : backend_(backend), level_(level), scale_(scale), body_(std::move(body)) {}

  BackendTag backend() const { return backend_; }
  std::uint32_t level() const { return level_; }
  double scale() const { return scale_; }
  bool empty() const { return body_ == nullptr; }

  // Backend-specific payload bytes (the body of the wire envelope).
  Bytes payload() const { return body_->serialize(); }

  template <typename T>
  const T& body() const {
    return static_cast<const T&>(*body_);
  }

 private:
  BackendTag backend_ = BackendTag::kPlain;
  std::uint32_t level_ = 0;
  double scale_ = 1.0;
  std::shared_ptr<const Body> body_;
};

template <typename Role>
class Key {
 public:
  Key() = default;
  Key(std::string params_id, std::shared_ptr<const Body> body)
      : params_id_(std::move(params_id)), body_(std::move(body)) {}

  const std::string& params_id() const { return params_id_; }
  bool empty() const { return body_ == nullptr; }
  Bytes bytes() const { return body_ ? body_->serialize() : Bytes{}; }

  template <typename T>
  const T& body() const {
    return static_cast<const T&>(*body_);
  }

 private:
  std::string params_id_;
  std::shared_ptr<const Body> body_;
};

using PublicKey = Key<struct PublicKeyRole>;
using SecretKey = Key<struct SecretKeyRole>;
using RelinKey = Key<struct RelinKeyRole>;

struct KeyPair {
  PublicKey public_key;
  SecretKey secret_key;
  RelinKey relin_key;

  const std::string& params_id() const { return public_key.params_id(); }
};

// The keys an evaluating party holds. There is no secret key here.
struct EvaluationKeys {
  PublicKey public_key;
  RelinKey relin_key;

  static EvaluationKeys from(const KeyPair& keys) {
    return {keys.public_key, keys.relin_key};
  }
};

struct SchemeParams {
  BackendTag backend = BackendTag::kPlain;
  std::uint32_t max_depth = kUnboundedDepth;
  double plaintext_bound = kDefaultPlaintextBound;
  // When false, binary operations on ciphertexts at different levels drop the
  // higher operand to the lower level instead of failing.
  bool strict_levels = true;
  std::optional<ckks::CkksParams> ckks;

  std::string params_id() const;
};

struct OpCounts {
  std::uint64_t encrypt = 0;
  std::uint64_t decrypt = 0;
  std::uint64_t hsub = 0;
  std::uint64_t hmul = 0;
  std::uint64_t hmul_plain = 0;
};

// The homomorphic capability every search component is written against.
//
// Public entry points validate arguments, count the operation, and forward
// to the backend implementation. All methods are const and safe to call
// concurrently; only the counters are shared mutable state.
class Backend {
 public:
  explicit Backend(SchemeParams params);
  virtual ~Backend() = default;

  Backend(const Backend&) = delete;
  Backend& operator=(const Backend&) = delete;

  BackendTag tag() const { return params_.backend; }
  const SchemeParams& params() const { return params_; }
  const std::string& params_id() const { return params_id_; }
  std::uint32_t max_depth() const { return params_.max_depth; }

  KeyPair keygen(std::uint64_t seed) const;
  Ciphertext encrypt(const PublicKey& pk, double m) const;
  double decrypt(const SecretKey& sk, const Ciphertext& c) const;
  Ciphertext hsub(const Ciphertext& a, const Ciphertext& b) const;
  Ciphertext hmul(const Ciphertext& a, const Ciphertext& b,
                  const RelinKey& rlk) const;
  Ciphertext hmul_plain(const Ciphertext& a, double k) const;
  std::uint32_t remaining_depth(const Ciphertext& c) const { return c.level(); }

  // Rebuilds a ciphertext from the fields of its wire envelope.
  virtual Ciphertext parse_ciphertext(std::uint16_t level, double scale,
                                      ByteSpan payload) const = 0;
  virtual PublicKey parse_public_key(ByteSpan bytes) const = 0;
  virtual SecretKey parse_secret_key(ByteSpan bytes) const = 0;
  virtual RelinKey parse_relin_key(ByteSpan bytes) const = 0;

  OpCounts counts() const;
  void reset_counts();

 protected:
  virtual KeyPair do_keygen(std::uint64_t seed) const = 0;
  virtual Ciphertext do_encrypt(const PublicKey& pk, double m) const = 0;
  virtual double do_decrypt(const SecretKey& sk, const Ciphertext& c) const = 0;
  virtual Ciphertext do_hsub(const Ciphertext& a, const Ciphertext& b) const = 0;
  virtual Ciphertext do_hmul(const Ciphertext& a, const Ciphertext& b,
                             const RelinKey& rlk) const = 0;
  virtual Ciphertext do_hmul_plain(const Ciphertext& a, double k) const = 0;

  void check_ciphertext(const Ciphertext& c) const;
  template <typename K>
  void check_key(const K& key, std::string_view what) const;

 private:
  SchemeParams params_;
  std::string params_id_;

  mutable std::atomic<std::uint64_t> encrypt_count_{0};
  mutable std::atomic<std::uint64_t> decrypt_count_{0};
  mutable std::atomic<std::uint64_t> hsub_count_{0};
  mutable std::atomic<std::uint64_t> hmul_count_{0};
  mutable std::atomic<std::uint64_t> hmul_plain_count_{0};
};

}  // namespace hesearch::he

#endif  // HESEARCH_HE_BACKEND_H_
