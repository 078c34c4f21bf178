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

#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "gtest/gtest.h"
#include "hesearch/error.h"
#include "hesearch/he/plain_backend.h"
#include "hesearch/he/registry.h"
#include "hesearch/he/serialization.h"

namespace hesearch::he {
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

TEST(WideExpRealTest, MatchesDoubleArithmeticInRange) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 10000; ++i) {
    double a = u(rng);
    double b = u(rng);
    auto wa = WideExpReal::from_double(a);
    auto wb = WideExpReal::from_double(b);
    ASSERT_EQ((wa * wb).to_double(), a * b);
    ASSERT_EQ((wa - wb).to_double(), a - b);
  }
}

TEST(WideExpRealTest, NeverUnderflowsToZero) {
  auto tiny = WideExpReal::from_double(1e-200);
  auto p = tiny * tiny * tiny;
  EXPECT_FALSE(p.is_zero());
  EXPECT_NE(p.to_double(), 0.0);
  EXPECT_TRUE((p - p).is_zero());
  auto huge = WideExpReal::from_double(1e200);
  EXPECT_TRUE(std::isinf((huge * huge).to_double()));
  EXPECT_EQ((huge * huge * tiny * tiny).to_double(), 1e200 * 1e-200 * 1e200 * 1e-200);
}

TEST(WideExpRealTest, FromPartsValidatesMantissa) {
  EXPECT_EQ(WideExpReal::from_parts(0.75, 3).to_double(), 6.0);
  EXPECT_EQ(code_of([] { WideExpReal::from_parts(1.5, 0); }), ErrorCode::kMalformed);
  EXPECT_EQ(code_of([] { WideExpReal::from_double(INFINITY); }), ErrorCode::kOutOfRange);
}

class PlainBackendTest : public ::testing::Test {
 protected:
  PlainBackend backend_;
  KeyPair keys_ = backend_.keygen(1);

  Ciphertext enc(double m) { return backend_.encrypt(keys_.public_key, m); }
  double dec(const Ciphertext& c) { return backend_.decrypt(keys_.secret_key, c); }
};

TEST_F(PlainBackendTest, ExactOperations) {
  EXPECT_EQ(dec(enc(0.0)), 0.0);
  EXPECT_EQ(dec(enc(5.0)), 5.0);
  EXPECT_EQ(dec(backend_.hsub(enc(7), enc(7))), 0.0);
  EXPECT_EQ(dec(backend_.hsub(enc(5), enc(3))), 2.0);
  EXPECT_EQ(dec(backend_.hmul(enc(2), enc(3), keys_.relin_key)), 6.0);
  EXPECT_EQ(dec(backend_.hmul_plain(enc(4), 0.5)), 2.0);
  EXPECT_EQ(dec(backend_.hmul_plain(enc(4), 1.0)), 4.0);
  EXPECT_EQ(code_of([&] { backend_.hmul_plain(enc(4), 0.0); }), ErrorCode::kInvalidArgument);
}

TEST_F(PlainBackendTest, LongProductKeepsZeroSignal) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.9, 1.1);
  Ciphertext acc = enc(1e-3);
  for (int i = 0; i < 2000; ++i) acc = backend_.hmul(acc, enc(u(rng) * 1e-3), keys_.relin_key);
  EXPECT_NE(dec(acc), 0.0);
  EXPECT_EQ(backend_.remaining_depth(acc), kUnboundedDepth);
  Ciphertext with_zero = backend_.hmul(acc, backend_.hsub(enc(3), enc(3)), keys_.relin_key);
  EXPECT_EQ(dec(with_zero), 0.0);
}

TEST_F(PlainBackendTest, CountersTrackOperations) {
  backend_.reset_counts();
  auto a = enc(1);
  auto b = enc(2);
  backend_.hsub(a, b);
  backend_.hmul(a, b, keys_.relin_key);
  backend_.hmul(a, b, keys_.relin_key);
  dec(a);
  OpCounts c = backend_.counts();
  EXPECT_EQ(c.encrypt, 2u);
  EXPECT_EQ(c.hsub, 1u);
  EXPECT_EQ(c.hmul, 2u);
  EXPECT_EQ(c.decrypt, 1u);
  EXPECT_EQ(c.hmul_plain, 0u);
}

TEST_F(PlainBackendTest, EncryptionsOfEqualValuesDiffer) {
  std::set<Bytes> payloads;
  for (int i = 0; i < 100; ++i) payloads.insert(enc(3.14).payload());
  EXPECT_EQ(payloads.size(), 100u);
}

TEST_F(PlainBackendTest, RejectsOutOfRangePlaintexts) {
  EXPECT_EQ(code_of([&] { enc(std::ldexp(1.0, 30)); }), ErrorCode::kOutOfRange);
  EXPECT_EQ(code_of([&] { enc(NAN); }), ErrorCode::kOutOfRange);
  EXPECT_EQ(dec(enc(std::ldexp(1.0, 20))), std::ldexp(1.0, 20));
}

TEST_F(PlainBackendTest, EnvelopeLayout) {
  Ciphertext c = enc(-6.0);
  Bytes wire = serialize_ciphertext(c);
  ByteReader in(wire);
  EXPECT_EQ(std::string(reinterpret_cast<const char*>(in.raw(4).data()), 4), "HSC1");
  EXPECT_EQ(in.u8(), 0);            // plain tag
  EXPECT_EQ(in.u16(), 0xFFFF);      // unbounded level
  EXPECT_EQ(in.f64(), 1.0);         // scale
  EXPECT_EQ(in.u32(), 8u + 8u + 16u);
  EXPECT_EQ(in.f64(), -0.75);       // -6 = -0.75 * 2^3
  EXPECT_EQ(in.u64(), 3u);
  Ciphertext back = deserialize_ciphertext(backend_, wire);
  EXPECT_EQ(dec(back), -6.0);
  EXPECT_EQ(back.payload(), c.payload());
}

TEST_F(PlainBackendTest, EnvelopeRejectsCorruption) {
  Bytes wire = serialize_ciphertext(enc(1.0));
  Bytes bad_magic = wire;
  bad_magic[0] = 'X';
  EXPECT_EQ(code_of([&] { deserialize_ciphertext(backend_, bad_magic); }),
            ErrorCode::kMalformed);
  Bytes truncated(wire.begin(), wire.end() - 1);
  EXPECT_EQ(code_of([&] { deserialize_ciphertext(backend_, truncated); }),
            ErrorCode::kMalformed);
  Bytes trailing = wire;
  trailing.push_back(0);
  EXPECT_EQ(code_of([&] { deserialize_ciphertext(backend_, trailing); }),
            ErrorCode::kMalformed);
  Bytes ckks_tag = wire;
  ckks_tag[4] = 1;
  EXPECT_EQ(code_of([&] { deserialize_ciphertext(backend_, ckks_tag); }),
            ErrorCode::kTagMismatch);
  Bytes unknown_tag = wire;
  unknown_tag[4] = 9;
  EXPECT_EQ(code_of([&] { deserialize_ciphertext(backend_, unknown_tag); }),
            ErrorCode::kMalformed);
}

TEST_F(PlainBackendTest, KeyFileRoundTrip) {
  Bytes full = serialize_key_file(keys_, true);
  Bytes pub = serialize_key_file(keys_, false);
  EXPECT_EQ(key_file_params_id(full), "plain");
  KeyPair back = parse_key_file(backend_, full);
  EXPECT_EQ(back.secret_key.bytes(), keys_.secret_key.bytes());
  EXPECT_TRUE(parse_key_file(backend_, pub).secret_key.empty());
  KeyPair public_only = parse_key_file(backend_, pub);
  Ciphertext c = backend_.encrypt(public_only.public_key, 1);
  EXPECT_EQ(code_of([&] { backend_.decrypt(public_only.secret_key, c); }),
            ErrorCode::kInvalidArgument);
}

TEST_F(PlainBackendTest, KeygenIsDeterministicPerSeed) {
  EXPECT_EQ(backend_.keygen(1).secret_key.bytes(), keys_.secret_key.bytes());
  EXPECT_NE(backend_.keygen(2).secret_key.bytes(), keys_.secret_key.bytes());
}

TEST(RegistryTest, PresetNames) {
  auto names = preset_names();
  EXPECT_EQ(names.front(), "plain");
  EXPECT_EQ(names.size(), 11u);
  EXPECT_TRUE(preset_is_insecure("plain"));
  EXPECT_TRUE(preset_is_insecure("toy-insecure"));
  EXPECT_FALSE(preset_is_insecure("desk"));
  EXPECT_EQ(preset_params("desk").max_depth, 6u);
  EXPECT_EQ(preset_params("desk").ckks->ring_degree, 8192u);
  EXPECT_EQ(preset_params("desk-d8").ckks->moduli.size(), 9u);
  EXPECT_EQ(preset_params("toy-insecure").ckks->ring_degree, 1024u);
}

TEST(RegistryTest, UnknownPresetListsAlternatives) {
  for (const char* name : {"nope", "desk-d9", "desk-d0", "desk-d", ""}) {
    try {
      preset_params(name);
      ADD_FAILURE() << name;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidParams);
      EXPECT_NE(std::string(e.what()).find("toy-insecure"), std::string::npos);
    }
  }
}

TEST(RegistryTest, ParamsIdResolution) {
  EXPECT_EQ(backend_for_params_id("plain")->tag(), BackendTag::kPlain);
  EXPECT_EQ(backend_for_params_id("ckks-desk-d3")->max_depth(), 3u);
  EXPECT_EQ(backend_for_params_id("ckks-toy-insecure")->params_id(), "ckks-toy-insecure");
  for (const char* id : {"ckks-plain", "ckks-custom-n4096-l4-d3", "bfv-desk", ""}) {
    EXPECT_EQ(code_of([&] { backend_for_params_id(id); }), ErrorCode::kParamsMismatch) << id;
  }
}

TEST(RegistryTest, KeysAreBoundToTheirParameterSet) {
  PlainBackend plain;
  KeyPair plain_keys = plain.keygen(1);
  auto toy = make_backend("toy-insecure");
  EXPECT_EQ(code_of([&] { toy->encrypt(plain_keys.public_key, 1.0); }),
            ErrorCode::kParamsMismatch);
  EXPECT_EQ(code_of([&] { parse_key_file(*toy, serialize_key_file(plain_keys, true)); }),
            ErrorCode::kParamsMismatch);
}

}  // namespace
}  // namespace hesearch::he
