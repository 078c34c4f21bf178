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

#ifndef HESEARCH_CKKS_SCHEME_H_
#define HESEARCH_CKKS_SCHEME_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "hesearch/bytes.h"
#include "hesearch/ckks/params.h"
#include "hesearch/ckks/ring.h"
#include "hesearch/random.h"

namespace hesearch::ckks {

// Validated parameters plus the shared ring context. Fresh ciphertexts are
// created at level `max_depth()` and every multiplication consumes one level.
class CkksContext {
 public:
  static std::shared_ptr<const CkksContext> create(CkksParams params, std::size_t max_depth);

  const CkksParams& params() const { return params_; }
  const std::shared_ptr<const RnsContext>& rns() const { return rns_; }
  std::size_t degree() const { return params_.ring_degree; }
  std::size_t max_depth() const { return max_depth_; }
  double scale() const { return params_.scale; }
  // Relinearization digits needed to cover prime j.
  int digit_count(std::size_t j) const;
  int binomial_width() const { return binomial_width_; }

 private:
  CkksContext(CkksParams params, std::size_t max_depth);

  CkksParams params_;
  std::size_t max_depth_;
  int binomial_width_;
  std::shared_ptr<const RnsContext> rns_;
};

// Components are kept in evaluation form. Two components externally; three
// only between a tensor product and relinearization.
struct CkksCiphertext {
  std::vector<RingElem> components;
  std::size_t level = 0;
  double scale = 1.0;
};

struct SecretKeyData {
  std::vector<std::int8_t> coefficients;  // ternary
  RingElem eval;                          // at the top level
};

struct PublicKeyData {
  RingElem b;  // -a*s + e
  RingElem a;
};

// parts[j][k] encrypts 2^(w*k) * s^2 under the gadget vector that is 1 mod q_j
// and 0 mod every other prime.
struct RelinKeyData {
  std::vector<std::vector<std::pair<RingElem, RingElem>>> parts;
};

struct KeyMaterial {
  SecretKeyData secret;
  PublicKeyData public_key;
  RelinKeyData relin;
};

KeyMaterial generate_keys(const CkksContext& ctx, Prng& prng);

// Constant polynomial round(v * scale) at the given level, coefficient form.
RingElem encode(const CkksContext& ctx, double v, double scale, std::size_t level);
// Centered lift of coefficient 0 divided by scale.
double decode(const CkksContext& ctx, const RingElem& p, double scale);

CkksCiphertext encrypt(const CkksContext& ctx, const PublicKeyData& pk, double m, Prng& prng);
// The message polynomial c0 + c1*s (+ c2*s^2), evaluation form.
RingElem decrypt_to_ring(const CkksContext& ctx, const SecretKeyData& sk,
                         const CkksCiphertext& c);
double decrypt(const CkksContext& ctx, const SecretKeyData& sk, const CkksCiphertext& c);

// Brings both operands to the lower level when `strict_levels` is false.
CkksCiphertext subtract(const CkksContext& ctx, const CkksCiphertext& a,
                        const CkksCiphertext& b, bool strict_levels);
// Raw 3-component product at scale a.scale * b.scale.
CkksCiphertext tensor(const CkksContext& ctx, const CkksCiphertext& a, const CkksCiphertext& b,
                      bool strict_levels);
CkksCiphertext relinearize(const CkksContext& ctx, const CkksCiphertext& c,
                           const RelinKeyData& rlk);
CkksCiphertext rescale(const CkksContext& ctx, const CkksCiphertext& c);
// tensor, relinearize, rescale.
CkksCiphertext multiply(const CkksContext& ctx, const CkksCiphertext& a,
                        const CkksCiphertext& b, const RelinKeyData& rlk, bool strict_levels);
// Multiplies by round(k * q_top) and rescales, leaving the scale nearly
// unchanged.
CkksCiphertext multiply_scalar(const CkksContext& ctx, const CkksCiphertext& a, double k);

// Payload format 1: component count u8, then per component N coefficients
// of the centered lift, each as sign u8 | length u8 | big-endian magnitude.
Bytes serialize_payload(const CkksContext& ctx, const CkksCiphertext& c);
CkksCiphertext parse_payload(const CkksContext& ctx, std::size_t level, double scale,
                             ByteSpan payload);

Bytes serialize_secret_key(const CkksContext& ctx, const SecretKeyData& sk);
Bytes serialize_public_key(const CkksContext& ctx, const PublicKeyData& pk);
Bytes serialize_relin_key(const CkksContext& ctx, const RelinKeyData& rlk);
SecretKeyData parse_secret_key(const CkksContext& ctx, ByteSpan bytes);
PublicKeyData parse_public_key(const CkksContext& ctx, ByteSpan bytes);
RelinKeyData parse_relin_key(const CkksContext& ctx, ByteSpan bytes);

}  // namespace hesearch::ckks

#endif  // HESEARCH_CKKS_SCHEME_H_
