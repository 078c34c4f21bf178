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

#ifndef HESEARCH_CKKS_BACKEND_H_
#define HESEARCH_CKKS_BACKEND_H_

#include <cstddef>
#include <memory>

#include "hesearch/ckks/scheme.h"
#include "hesearch/he/backend.h"

namespace hesearch::ckks {

// Measured worst-case absolute error bound for a complete product tree of
// the given depth on inputs in [0.9, 1.1] with the desk presets. Grows with
// depth; see tests/ckks_depth_test.cc for the measurement.
double epsilon_depth(std::size_t depth);

// The leveled scheme behind the generic backend interface.
class CkksBackend final : public he::Backend {
 public:
  struct CiphertextBody final : he::Body {
    std::shared_ptr<const CkksContext> context;
    CkksCiphertext value;
    Bytes serialize() const override { return serialize_payload(*context, value); }
  };

  explicit CkksBackend(he::SchemeParams params);

  const CkksContext& context() const { return *context_; }
  const ErrorBounds& bounds() const { return context_->params().bounds; }

  he::Ciphertext parse_ciphertext(std::uint16_t level, double scale,
                                  ByteSpan payload) const override;
  he::PublicKey parse_public_key(ByteSpan bytes) const override;
  he::SecretKey parse_secret_key(ByteSpan bytes) const override;
  he::RelinKey parse_relin_key(ByteSpan bytes) const override;

  // Wraps scheme-level values; exposed for tests that exercise the raw
  // relinearize and rescale steps.
  he::Ciphertext wrap(CkksCiphertext c) const;
  static const CkksCiphertext& unwrap(const he::Ciphertext& c);

 protected:
  he::KeyPair do_keygen(std::uint64_t seed) const override;
  he::Ciphertext do_encrypt(const he::PublicKey& pk, double m) const override;
  double do_decrypt(const he::SecretKey& sk, const he::Ciphertext& c) const override;
  he::Ciphertext do_hsub(const he::Ciphertext& a, const he::Ciphertext& b) const override;
  he::Ciphertext do_hmul(const he::Ciphertext& a, const he::Ciphertext& b,
                         const he::RelinKey& rlk) const override;
  he::Ciphertext do_hmul_plain(const he::Ciphertext& a, double k) const override;

 private:
  std::shared_ptr<const CkksContext> context_;
};

}  // namespace hesearch::ckks

#endif  // HESEARCH_CKKS_BACKEND_H_
