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

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <set>

#include "gtest/gtest.h"
#include "hesearch/ckks/backend.h"
#include "hesearch/ckks/scheme.h"
#include "hesearch/error.h"
#include "hesearch/he/plain_backend.h"
#include "hesearch/he/registry.h"
#include "hesearch/he/serialization.h"

namespace hesearch::ckks {
namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

// Scheme-level fixture on the toy parameters (N = 1024, depth 2).
class SchemeTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ctx_ = CkksContext::create(make_params("toy", 1024, 2), 2);
    Prng prng = Prng::from_seed(1, "scheme-test");
    keys_ = generate_keys(*ctx_, prng);
  }

  CkksCiphertext enc(double m) { return encrypt(*ctx_, keys_.public_key, m, prng_); }
  double dec(const CkksCiphertext& c) { return decrypt(*ctx_, keys_.secret, c); }

  std::shared_ptr<const CkksContext> ctx_;
  KeyMaterial keys_;
  Prng prng_ = Prng::from_seed(2, "scheme-test-enc");
};

TEST_F(SchemeTest, EncodeZeroIsZeroPolynomial) {
  RingElem p = encode(*ctx_, 0.0, ctx_->scale(), 2);
  EXPECT_EQ(p, RingElem(ctx_->rns(), 2, Form::kCoefficient));
  EXPECT_EQ(decode(*ctx_, p, ctx_->scale()), 0.0);
}

TEST_F(SchemeTest, EncodeIsConstantPolynomial) {
  RingElem p = encode(*ctx_, -2.5, ctx_->scale(), 1);
  for (std::size_t j = 0; j <= 1; ++j) {
    for (std::size_t i = 1; i < ctx_->degree(); ++i) ASSERT_EQ(p.row(j)[i], 0u);
  }
  auto [negative, magnitude] = p.centered_coefficient(0);
  EXPECT_TRUE(negative);
  EXPECT_EQ(magnitude, WideUint::from_double(2.5 * ctx_->scale()));
}

TEST_F(SchemeTest, DecodeEncodeGridWithinOneOverScale) {
  const double scale = std::ldexp(1.0, 40);
  EXPECT_NEAR(decode(*ctx_, encode(*ctx_, 1.5, scale, 2), scale), 1.5, std::ldexp(1.0, -40));
  // 10^4 points spanning [-2^20, 2^20], including non-representable fractions.
  double worst = 0;
  for (int k = 0; k < 10000; ++k) {
    double x = -std::ldexp(1.0, 20) + k * (std::ldexp(1.0, 21) / 9999.0) + 1e-7 * (k % 13);
    double got = decode(*ctx_, encode(*ctx_, x, scale, 2), scale);
    worst = std::max(worst, std::fabs(got - x));
  }
  EXPECT_LE(worst, 1.0 / scale);
}

TEST_F(SchemeTest, DecodeAcceptsEvaluationForm) {
  RingElem p = encode(*ctx_, 0.75, ctx_->scale(), 2);
  EXPECT_DOUBLE_EQ(decode(*ctx_, p.in_form(Form::kEvaluation), ctx_->scale()), 0.75);
}

TEST_F(SchemeTest, EncodeOverflowIsRejected) {
  // Level 0 keeps only the 60-bit base prime: 2^30 * 2^40 does not fit.
  EXPECT_EQ(code_of([&] { encode(*ctx_, std::ldexp(1.0, 30), ctx_->scale(), 0); }),
            ErrorCode::kOutOfRange);
  EXPECT_EQ(code_of([&] { encode(*ctx_, 1e300, ctx_->scale(), 2); }), ErrorCode::kOutOfRange);
  EXPECT_EQ(code_of([&] { encode(*ctx_, NAN, ctx_->scale(), 2); }), ErrorCode::kInvalidArgument);
}

TEST_F(SchemeTest, FreshCiphertextShape) {
  CkksCiphertext c = enc(1.0);
  EXPECT_EQ(c.components.size(), 2u);
  EXPECT_EQ(c.level, 2u);
  EXPECT_EQ(c.scale, ctx_->scale());
  EXPECT_NEAR(dec(c), 1.0, 1e-6);
}

TEST_F(SchemeTest, RelinearizeThenRescaleGivesProduct) {
  CkksCiphertext raw = tensor(*ctx_, enc(2.0), enc(3.0), true);
  EXPECT_EQ(raw.components.size(), 3u);
  CkksCiphertext relin = relinearize(*ctx_, raw, keys_.relin);
  EXPECT_EQ(relin.components.size(), 2u);
  CkksCiphertext out = rescale(*ctx_, relin);
  EXPECT_EQ(out.level, 1u);
  EXPECT_NEAR(dec(out), 6.0, 1e-4);
}

TEST_F(SchemeTest, RelinearizationNoiseIsSmall) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 20; ++i) {
    CkksCiphertext raw = tensor(*ctx_, enc(u(rng)), enc(u(rng)), true);
    double before = decode(*ctx_, decrypt_to_ring(*ctx_, keys_.secret, raw), raw.scale);
    double after = dec(relinearize(*ctx_, raw, keys_.relin));
    EXPECT_LE(std::fabs(before - after), 1e-6);
  }
}

TEST_F(SchemeTest, RelinearizeNeedsThreeComponents) {
  EXPECT_EQ(code_of([&] { relinearize(*ctx_, enc(1.0), keys_.relin); }),
            ErrorCode::kInvalidArgument);
}

TEST_F(SchemeTest, RescaleDividesScaleByDroppedPrime) {
  CkksCiphertext raw = tensor(*ctx_, enc(1.25), enc(-0.5), true);
  EXPECT_DOUBLE_EQ(raw.scale, ctx_->scale() * ctx_->scale());
  CkksCiphertext out = rescale(*ctx_, relinearize(*ctx_, raw, keys_.relin));
  const double dropped = static_cast<double>(ctx_->rns()->modulus(2).value());
  EXPECT_DOUBLE_EQ(out.scale, raw.scale / dropped);
  EXPECT_NEAR(out.scale / ctx_->scale(), 1.0, 1e-3);
  EXPECT_NEAR(dec(out), -0.625, 1e-4);
}

TEST_F(SchemeTest, RescaleAtLevelZeroFails) {
  CkksCiphertext c = enc(1.0);
  c = multiply(*ctx_, c, c, keys_.relin, true);
  c = multiply(*ctx_, c, c, keys_.relin, true);
  ASSERT_EQ(c.level, 0u);
  EXPECT_EQ(code_of([&] { rescale(*ctx_, c); }), ErrorCode::kDepthExhausted);
  EXPECT_EQ(code_of([&] { multiply(*ctx_, c, c, keys_.relin, true); }),
            ErrorCode::kDepthExhausted);
}

TEST_F(SchemeTest, LevelMismatchStrictAndLenient) {
  CkksCiphertext a = enc(2.0);
  CkksCiphertext b = multiply(*ctx_, enc(1.0), enc(1.0), keys_.relin, true);
  EXPECT_EQ(code_of([&] { subtract(*ctx_, a, b, true); }), ErrorCode::kLevelMismatch);
  // Lenient alignment drops a to b's level; the scales then differ by the
  // rescale drift, which must be reported rather than silently ignored.
  EXPECT_EQ(code_of([&] { subtract(*ctx_, a, b, false); }), ErrorCode::kScaleMismatch);
  CkksCiphertext c = multiply_scalar(*ctx_, enc(2.0), 1.0);
  CkksCiphertext d = multiply_scalar(*ctx_, enc(0.5), 1.0);
  EXPECT_NEAR(dec(subtract(*ctx_, c, d, true)), 1.5, 1e-4);
}

TEST_F(SchemeTest, PayloadRoundTrip) {
  CkksCiphertext c = enc(-1.75);
  Bytes payload = serialize_payload(*ctx_, c);
  CkksCiphertext back = parse_payload(*ctx_, c.level, c.scale, payload);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(back.components[i], c.components[i]);
  EXPECT_NEAR(dec(back), -1.75, 1e-6);
  // A product at a lower level uses fewer residues.
  CkksCiphertext p = multiply(*ctx_, c, c, keys_.relin, true);
  CkksCiphertext p_back = parse_payload(*ctx_, p.level, p.scale, serialize_payload(*ctx_, p));
  EXPECT_NEAR(dec(p_back), 1.75 * 1.75, 1e-4);
}

TEST_F(SchemeTest, PayloadRejectsCorruption) {
  CkksCiphertext c = enc(1.0);
  Bytes payload = serialize_payload(*ctx_, c);
  Bytes truncated(payload.begin(), payload.end() - 1);
  EXPECT_EQ(code_of([&] { parse_payload(*ctx_, 2, c.scale, truncated); }), ErrorCode::kMalformed);
  Bytes wrong_count = payload;
  wrong_count[0] = 3;
  EXPECT_EQ(code_of([&] { parse_payload(*ctx_, 2, c.scale, wrong_count); }),
            ErrorCode::kMalformed);
  Bytes bad_sign = payload;
  bad_sign[1] = 2;
  EXPECT_EQ(code_of([&] { parse_payload(*ctx_, 2, c.scale, bad_sign); }), ErrorCode::kMalformed);
  EXPECT_EQ(code_of([&] { parse_payload(*ctx_, 3, c.scale, payload); }),
            ErrorCode::kParamsMismatch);
}

TEST_F(SchemeTest, KeySerializationRoundTrip) {
  SecretKeyData sk = parse_secret_key(*ctx_, serialize_secret_key(*ctx_, keys_.secret));
  EXPECT_EQ(sk.coefficients, keys_.secret.coefficients);
  PublicKeyData pk = parse_public_key(*ctx_, serialize_public_key(*ctx_, keys_.public_key));
  EXPECT_EQ(pk.a, keys_.public_key.a);
  EXPECT_EQ(pk.b, keys_.public_key.b);
  RelinKeyData rlk = parse_relin_key(*ctx_, serialize_relin_key(*ctx_, keys_.relin));
  CkksCiphertext out = multiply(*ctx_, enc(1.5), enc(2.0), rlk, true);
  EXPECT_NEAR(decrypt(*ctx_, sk, out), 3.0, 1e-4);
}

TEST_F(SchemeTest, SecretKeyIsTernary) {
  std::array<int, 3> counts{};
  for (std::int8_t v : keys_.secret.coefficients) {
    ASSERT_GE(v, -1);
    ASSERT_LE(v, 1);
    ++counts[static_cast<std::size_t>(v + 1)];
  }
  for (int c : counts) EXPECT_GT(c, 250);  // about 341 each for N = 1024
}

TEST(ContextTest, ChainMustCoverDepth) {
  CkksParams p;
  p.ring_degree = 1024;
  p.moduli = ntt_primes(1024, {60});
  EXPECT_EQ(code_of([&] { CkksContext::create(p, 3); }), ErrorCode::kInvalidParams);
  he::SchemeParams scheme;
  scheme.backend = he::BackendTag::kCkks;
  scheme.max_depth = 3;
  scheme.ckks = p;
  EXPECT_EQ(code_of([&] { CkksBackend backend(scheme); }), ErrorCode::kInvalidParams);
}

TEST(ContextTest, DigitCountCoversEachPrime) {
  auto ctx = CkksContext::create(make_params("toy", 1024, 2), 2);
  EXPECT_EQ(ctx->digit_count(0), 3);  // 60 bits in 20-bit digits
  EXPECT_EQ(ctx->digit_count(1), 2);
}

// Backend-level behavior through the generic interface.
class CkksBackendTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    toy_ = he::make_backend("toy-insecure").release();
    toy_keys_ = new he::KeyPair(toy_->keygen(5));
  }
  static void TearDownTestSuite() {
    delete toy_keys_;
    delete toy_;
  }

  static he::Backend* toy_;
  static he::KeyPair* toy_keys_;
};

he::Backend* CkksBackendTest::toy_ = nullptr;
he::KeyPair* CkksBackendTest::toy_keys_ = nullptr;

TEST_F(CkksBackendTest, HomomorphismOnRandomPairs) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2, 2);
  const ErrorBounds bounds;
  for (int i = 0; i < 200; ++i) {
    double a = u(rng);
    double b = u(rng);
    auto ca = toy_->encrypt(toy_keys_->public_key, a);
    auto cb = toy_->encrypt(toy_keys_->public_key, b);
    EXPECT_NEAR(toy_->decrypt(toy_keys_->secret_key, toy_->hmul(ca, cb, toy_keys_->relin_key)),
                a * b, bounds.mul);
    EXPECT_NEAR(toy_->decrypt(toy_keys_->secret_key, toy_->hsub(ca, cb)), a - b, bounds.add);
  }
}

TEST_F(CkksBackendTest, SpecExamples) {
  const auto& pk = toy_keys_->public_key;
  const auto& sk = toy_keys_->secret_key;
  const auto& rlk = toy_keys_->relin_key;
  EXPECT_NEAR(toy_->decrypt(sk, toy_->encrypt(pk, 0.0)), 0.0, 1e-6);
  EXPECT_NEAR(toy_->decrypt(sk, toy_->encrypt(pk, 5.0)), 5.0, 1e-6);
  auto c7 = toy_->encrypt(pk, 7.0);
  EXPECT_NEAR(toy_->decrypt(sk, toy_->hsub(c7, c7)), 0.0, 1e-6);
  EXPECT_NEAR(toy_->decrypt(sk, toy_->hsub(toy_->encrypt(pk, 5), toy_->encrypt(pk, 3))), 2.0,
              1e-6);
  EXPECT_NEAR(toy_->decrypt(sk, toy_->hmul(toy_->encrypt(pk, 2), toy_->encrypt(pk, 3), rlk)), 6.0,
              1e-4);
  for (double x : {-2.0, -0.3, 1.7, 2.0}) {
    auto zero = toy_->hmul(toy_->encrypt(pk, x), toy_->encrypt(pk, 0.0), rlk);
    EXPECT_NEAR(toy_->decrypt(sk, zero), 0.0, 1e-4);
  }
  auto c4 = toy_->encrypt(pk, 4.0);
  EXPECT_NEAR(toy_->decrypt(sk, toy_->hmul_plain(c4, 0.5)), 2.0, 1e-4);
  EXPECT_NEAR(toy_->decrypt(sk, toy_->hmul_plain(c4, 1.0)), 4.0, 1e-4);
  EXPECT_EQ(code_of([&] { toy_->hmul_plain(c4, 0.0); }), ErrorCode::kInvalidArgument);
}

TEST_F(CkksBackendTest, LevelAccounting) {
  const auto& pk = toy_keys_->public_key;
  auto c = toy_->encrypt(pk, 1.1);
  EXPECT_EQ(toy_->remaining_depth(c), toy_->max_depth());
  auto d = toy_->hsub(c, toy_->encrypt(pk, 0.1));
  EXPECT_EQ(d.level(), c.level());
  for (std::uint32_t k = 1; k <= toy_->max_depth(); ++k) {
    c = toy_->hmul(c, c, toy_keys_->relin_key);
    EXPECT_EQ(toy_->remaining_depth(c), toy_->max_depth() - k);
  }
  EXPECT_EQ(code_of([&] { toy_->hmul(c, c, toy_keys_->relin_key); }), ErrorCode::kDepthExhausted);
  EXPECT_EQ(code_of([&] { toy_->hmul_plain(c, 2.0); }), ErrorCode::kDepthExhausted);
  EXPECT_NEAR(toy_->decrypt(toy_keys_->secret_key, c), std::pow(1.1, 4), 1e-4);
}

TEST_F(CkksBackendTest, EncryptionIsRandomized) {
  std::set<Bytes> payloads;
  for (int i = 0; i < 100; ++i) {
    payloads.insert(toy_->encrypt(toy_keys_->public_key, 3.14).payload());
  }
  EXPECT_EQ(payloads.size(), 100u);
}

TEST_F(CkksBackendTest, KeygenIsDeterministicPerSeed) {
  he::KeyPair again = toy_->keygen(5);
  EXPECT_EQ(again.public_key.bytes(), toy_keys_->public_key.bytes());
  EXPECT_EQ(again.secret_key.bytes(), toy_keys_->secret_key.bytes());
  EXPECT_EQ(again.relin_key.bytes(), toy_keys_->relin_key.bytes());
  EXPECT_NE(toy_->keygen(6).secret_key.bytes(), toy_keys_->secret_key.bytes());
  EXPECT_EQ(again.params_id(), "ckks-toy-insecure");
}

TEST_F(CkksBackendTest, RejectsOutOfRangeAndForeignInputs) {
  const auto& pk = toy_keys_->public_key;
  EXPECT_EQ(code_of([&] { toy_->encrypt(pk, std::ldexp(1.0, 21)); }), ErrorCode::kOutOfRange);
  EXPECT_EQ(code_of([&] { toy_->encrypt(pk, NAN); }), ErrorCode::kOutOfRange);
  he::PlainBackend plain;
  he::KeyPair plain_keys = plain.keygen(1);
  auto plain_c = plain.encrypt(plain_keys.public_key, 1.0);
  auto ckks_c = toy_->encrypt(pk, 1.0);
  EXPECT_EQ(code_of([&] { toy_->hsub(ckks_c, plain_c); }), ErrorCode::kTagMismatch);
  EXPECT_EQ(code_of([&] { toy_->decrypt(plain_keys.secret_key, ckks_c); }),
            ErrorCode::kParamsMismatch);
}

TEST_F(CkksBackendTest, WireEnvelopeRoundTrip) {
  auto c = toy_->hmul(toy_->encrypt(toy_keys_->public_key, 1.5),
                      toy_->encrypt(toy_keys_->public_key, 1.5), toy_keys_->relin_key);
  Bytes wire = he::serialize_ciphertext(c);
  auto back = he::deserialize_ciphertext(*toy_, wire);
  EXPECT_EQ(back.level(), c.level());
  EXPECT_EQ(back.scale(), c.scale());
  EXPECT_NEAR(toy_->decrypt(toy_keys_->secret_key, back), 2.25, 1e-4);
}

TEST_F(CkksBackendTest, KeyFileRoundTripAndMismatch) {
  Bytes full = he::serialize_key_file(*toy_keys_, true);
  Bytes pub = he::serialize_key_file(*toy_keys_, false);
  he::KeyPair keys = he::parse_key_file(*toy_, full);
  he::KeyPair public_only = he::parse_key_file(*toy_, pub);
  EXPECT_TRUE(public_only.secret_key.empty());
  EXPECT_LT(pub.size(), full.size());
  auto c = toy_->encrypt(public_only.public_key, 0.25);
  EXPECT_NEAR(toy_->decrypt(keys.secret_key, c), 0.25, 1e-6);
  auto desk = he::make_backend("desk-d1");
  EXPECT_EQ(code_of([&] { he::parse_key_file(*desk, full); }), ErrorCode::kParamsMismatch);
}

TEST(CkksPresetTest, CustomChainOfFourGivesDepthThree) {
  he::SchemeParams params;
  params.backend = he::BackendTag::kCkks;
  params.max_depth = 3;
  params.ckks = make_params("custom", 4096, 3);
  ASSERT_EQ(params.ckks->moduli.size(), 4u);
  CkksBackend backend(params);
  he::KeyPair keys = backend.keygen(1);
  EXPECT_EQ(keys.params_id(), "ckks-custom-n4096-l4-d3");
  auto c = backend.encrypt(keys.public_key, 3.14);
  EXPECT_EQ(backend.remaining_depth(c), 3u);
  EXPECT_NEAR(backend.decrypt(keys.secret_key, c), 3.14, 1e-6);
}

TEST(CkksPresetTest, DeskRoundTripAndProduct) {
  auto desk = he::make_backend("desk");
  EXPECT_EQ(desk->max_depth(), 6u);
  he::KeyPair keys = desk->keygen(1);
  auto c = desk->encrypt(keys.public_key, 3.14);
  EXPECT_NEAR(desk->decrypt(keys.secret_key, c), 3.14, 1e-6);
  auto p = desk->hmul(c, desk->encrypt(keys.public_key, -1.5), keys.relin_key);
  EXPECT_NEAR(desk->decrypt(keys.secret_key, p), -4.71, 1e-4);
}

TEST(CkksPresetTest, EqualParametersShareKeysAcrossInstances) {
  auto a = he::make_backend("toy-insecure");
  auto b = he::make_backend("toy-insecure");
  he::KeyPair keys = a->keygen(9);
  auto c = b->encrypt(keys.public_key, 0.5);
  EXPECT_NEAR(a->decrypt(keys.secret_key, b->hmul(c, c, keys.relin_key)), 0.25, 1e-4);
}

}  // namespace
}  // namespace hesearch::ckks
