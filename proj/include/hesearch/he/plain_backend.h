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

#ifndef HESEARCH_HE_PLAIN_BACKEND_H_
#define HESEARCH_HE_PLAIN_BACKEND_H_

#include <array>
#include <cstdint>

#include "hesearch/he/backend.h"

namespace hesearch::he {

// A real number stored as mantissa * 2^exponent with an unbounded exponent.
// Products and differences round exactly like IEEE doubles but never
// overflow or underflow, so long product chains keep exact zero/nonzero
// semantics.
class WideExpReal {
 public:
  WideExpReal() = default;
  static WideExpReal from_double(double v);
  static WideExpReal from_parts(double mantissa, std::int64_t exponent);

  double mantissa() const { return mantissa_; }
  std::int64_t exponent() const { return exponent_; }
  bool is_zero() const { return mantissa_ == 0.0; }

  // Nearest double; saturates to +-inf and keeps nonzero values nonzero by
  // returning the smallest subnormal instead of flushing to zero.
  double to_double() const;

  friend WideExpReal operator*(const WideExpReal& a, const WideExpReal& b);
  friend WideExpReal operator-(const WideExpReal& a, const WideExpReal& b);
  friend bool operator==(const WideExpReal&, const WideExpReal&) = default;

 private:
  static WideExpReal normalized(double mantissa, std::int64_t exponent);

  double mantissa_ = 0.0;  // 0 or |mantissa| in [0.5, 1)
  std::int64_t exponent_ = 0;
};

// Exact-arithmetic reference backend. NOT SECURE: the payload stores the
// plaintext in the clear next to a 16-byte random nonce. It exists as the
// correctness oracle for the search layers.
class PlainBackend final : public Backend {
 public:
  static constexpr std::size_t kNonceBytes = 16;

  struct CiphertextBody final : Body {
    WideExpReal value;
    std::array<std::uint8_t, kNonceBytes> nonce{};
    Bytes serialize() const override;
  };

  explicit PlainBackend(SchemeParams params = default_params());

  static SchemeParams default_params();

  Ciphertext parse_ciphertext(std::uint16_t level, double scale,
                              ByteSpan payload) const override;
  PublicKey parse_public_key(ByteSpan bytes) const override;
  SecretKey parse_secret_key(ByteSpan bytes) const override;
  RelinKey parse_relin_key(ByteSpan bytes) const override;

  // Reads the tracked value without a key; used by oracles in tests.
  static WideExpReal peek(const Ciphertext& c);

 protected:
  KeyPair do_keygen(std::uint64_t seed) const override;
  Ciphertext do_encrypt(const PublicKey& pk, double m) const override;
  double do_decrypt(const SecretKey& sk, const Ciphertext& c) const override;
  Ciphertext do_hsub(const Ciphertext& a, const Ciphertext& b) const override;
  Ciphertext do_hmul(const Ciphertext& a, const Ciphertext& b,
                     const RelinKey& rlk) const override;
  Ciphertext do_hmul_plain(const Ciphertext& a, double k) const override;

 private:
  Ciphertext make(WideExpReal value) const;
};

}  // namespace hesearch::he

#endif  // HESEARCH_HE_PLAIN_BACKEND_H_
