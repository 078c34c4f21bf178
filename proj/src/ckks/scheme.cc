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

#include "hesearch/ckks/scheme.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "hesearch/error.h"

namespace hesearch::ckks {
namespace {

// Scales whose relative difference is below this are treated as equal.
constexpr double kScaleTolerance = 0x1p-30;
constexpr std::uint8_t kPayloadComponents = 2;
constexpr std::size_t kMaxLevels = 16;

std::vector<std::int8_t> sample_ternary(std::size_t n, Prng& prng) {
  std::vector<std::int8_t> out(n);
  for (auto& v : out) v = static_cast<std::int8_t>(static_cast<int>(prng.uniform(3)) - 1);
  return out;
}

// Centered binomial with `width` coin pairs per sample.
std::vector<std::int64_t> sample_noise(std::size_t n, int width, Prng& prng) {
  std::vector<std::int64_t> out(n);
  for (auto& v : out) {
    std::int64_t acc = 0;
    for (int left = width; left > 0; left -= 32) {
      const int k = std::min(left, 32);
      const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
      const std::uint64_t w = prng.next_u64();
      acc += std::popcount(w & mask) - std::popcount((w >> 32) & mask);
    }
    v = acc;
  }
  return out;
}

RingElem small_to_eval(const CkksContext& ctx, std::size_t level,
                       std::span<const std::int64_t> coefficients) {
  RingElem r = RingElem::from_signed(ctx.rns(), level, coefficients);
  r.to_evaluation();
  return r;
}

RingElem sample_uniform(const CkksContext& ctx, std::size_t level, Prng& prng) {
  RingElem r(ctx.rns(), level, Form::kEvaluation);
  for (std::size_t j = 0; j <= level; ++j) {
    const std::uint64_t q = ctx.rns()->modulus(j).value();
    for (auto& v : r.row(j)) v = prng.uniform(q);
  }
  return r;
}

// acc += x * key over the rows of acc; key may carry extra rows.
void multiply_accumulate(RingElem& acc, const RingElem& x, const RingElem& key) {
  const auto& rns = *acc.context();
  for (std::size_t j = 0; j <= acc.level(); ++j) {
    const Modulus& q = rns.modulus(j);
    auto out = acc.row(j);
    auto xs = x.row(j);
    auto ks = key.row(j);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = q.add(out[i], q.mul(xs[i], ks[i]));
  }
}

RingElem multiply_rows(const RingElem& x, const RingElem& key) {
  RingElem out(x.context(), x.level(), Form::kEvaluation);
  multiply_accumulate(out, x, key);
  return out;
}


void check_scales(double a, double b) {
  if (std::fabs(a - b) > kScaleTolerance * std::max(a, b)) {
    throw Error(ErrorCode::kScaleMismatch,
                "scales " + std::to_string(a) + " and " + std::to_string(b) + " differ");
  }
}

CkksCiphertext dropped(const CkksCiphertext& c, std::size_t level) {
  CkksCiphertext out = c;
  for (auto& comp : out.components) comp.drop_to(level);
  out.level = level;
  return out;
}

std::pair<CkksCiphertext, CkksCiphertext> aligned(const CkksCiphertext& a,
                                                  const CkksCiphertext& b, bool strict) {
  if (a.level == b.level) return {a, b};
  if (strict) {
    throw Error(ErrorCode::kLevelMismatch, "operands at levels " + std::to_string(a.level) +
                                               " and " + std::to_string(b.level));
  }
  std::size_t level = std::min(a.level, b.level);
  return {dropped(a, level), dropped(b, level)};
}

void write_rows(ByteWriter& w, const RingElem& r) {
  for (std::size_t j = 0; j <= r.level(); ++j) {
    for (std::uint64_t v : r.row(j)) w.u64(v);
  }
}

RingElem read_rows(ByteReader& in, const CkksContext& ctx, std::size_t level) {
  RingElem r(ctx.rns(), level, Form::kEvaluation);
  for (std::size_t j = 0; j <= level; ++j) {
    const std::uint64_t q = ctx.rns()->modulus(j).value();
    for (auto& v : r.row(j)) {
      v = in.u64();
      if (v >= q) throw Error(ErrorCode::kMalformed, "key residue out of range");
    }
  }
  return r;
}

}  // namespace

CkksContext::CkksContext(CkksParams params, std::size_t max_depth)
    : params_(std::move(params)),
      max_depth_(max_depth),
      binomial_width_(ckks::binomial_width(params_.noise_stddev)) {}

std::shared_ptr<const CkksContext> CkksContext::create(CkksParams params,
                                                       std::size_t max_depth) {
  validate(params);
  if (max_depth < 1) throw Error(ErrorCode::kInvalidParams, "max-depth must be at least 1");
  if (params.moduli.size() < max_depth + 1) {
    throw Error(ErrorCode::kInvalidParams,
                "modulus chain of length " + std::to_string(params.moduli.size()) +
                    " cannot support depth " + std::to_string(max_depth));
  }
  if (max_depth + 1 > kMaxLevels) {
    throw Error(ErrorCode::kInvalidParams, "at most 16 levels are supported");
  }
  // Only the primes a fresh ciphertext uses are kept.
  params.moduli.resize(max_depth + 1);
  auto ctx = std::shared_ptr<CkksContext>(new CkksContext(params, max_depth));
  ctx->rns_ = std::make_shared<const RnsContext>(params.ring_degree, params.moduli);
  return ctx;
}

int CkksContext::digit_count(std::size_t j) const {
  const int bits = rns_->modulus(j).bits();
  return (bits + params_.decomposition_bits - 1) / params_.decomposition_bits;
}

KeyMaterial generate_keys(const CkksContext& ctx, Prng& prng) {
  const std::size_t n = ctx.degree();
  const std::size_t top = ctx.max_depth();
  const int width = ctx.binomial_width();
  KeyMaterial keys;

  keys.secret.coefficients = sample_ternary(n, prng);
  std::vector<std::int64_t> s(keys.secret.coefficients.begin(), keys.secret.coefficients.end());
  keys.secret.eval = small_to_eval(ctx, top, s);
  const RingElem& s_eval = keys.secret.eval;

  auto encrypt_zero = [&](RingElem& b, RingElem& a) {
    a = sample_uniform(ctx, top, prng);
    b = small_to_eval(ctx, top, sample_noise(n, width, prng));
    b -= multiply_rows(a, s_eval);
  };

  encrypt_zero(keys.public_key.b, keys.public_key.a);

  RingElem s_squared = s_eval;
  s_squared *= s_eval;
  const int w = ctx.params().decomposition_bits;
  keys.relin.parts.resize(top + 1);
  for (std::size_t j = 0; j <= top; ++j) {
    const Modulus& qj = ctx.rns()->modulus(j);
    for (int k = 0; k < ctx.digit_count(j); ++k) {
      RingElem b;
      RingElem a;
      encrypt_zero(b, a);
      const std::uint64_t gadget = qj.pow(2, static_cast<std::uint64_t>(w) * k);
      auto brow = b.row(j);
      auto srow = s_squared.row(j);
      for (std::size_t i = 0; i < n; ++i) brow[i] = qj.add(brow[i], qj.mul(gadget, srow[i]));
      keys.relin.parts[j].emplace_back(std::move(b), std::move(a));
    }
  }
  return keys;
}

RingElem encode(const CkksContext& ctx, double v, double scale, std::size_t level) {
  if (!std::isfinite(v) || !(scale > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "encode needs a finite value and positive scale");
  }
  const double scaled = std::nearbyint(v * scale);
  if (!std::isfinite(scaled) ||
      std::fabs(scaled) >= std::ldexp(1.0, static_cast<int>(WideUint::kLimbs * 64 - 64))) {
    throw Error(ErrorCode::kOutOfRange, "encoded value overflows the level modulus");
  }
  WideUint mag = WideUint::from_double(std::fabs(scaled));
  if (mag >= ctx.rns()->half_product(level)) {
    throw Error(ErrorCode::kOutOfRange, "encoded value overflows the level modulus");
  }
  RingElem out(ctx.rns(), level, Form::kCoefficient);
  for (std::size_t j = 0; j <= level; ++j) {
    const Modulus& q = ctx.rns()->modulus(j);
    std::uint64_t r = mag.mod(q.value());
    out.row(j)[0] = scaled < 0 ? q.neg(r) : r;
  }
  return out;
}

double decode(const CkksContext& ctx, const RingElem& p, double scale) {
  const auto& rns = *ctx.rns();
  std::array<std::uint64_t, kMaxLevels> residues{};
  for (std::size_t j = 0; j <= p.level(); ++j) {
    residues[j] = p.form() == Form::kEvaluation ? rns.ntt(j).constant_term(p.row(j))
                                                : p.row(j)[0];
  }
  WideUint x = rns.reconstruct(p.level(), std::span(residues.data(), p.level() + 1));
  long double value;
  if (x > rns.half_product(p.level())) {
    WideUint mag = rns.product(p.level());
    mag.subtract(x);
    value = -mag.to_long_double();
  } else {
    value = x.to_long_double();
  }
  return static_cast<double>(value / static_cast<long double>(scale));
}

CkksCiphertext encrypt(const CkksContext& ctx, const PublicKeyData& pk, double m, Prng& prng) {
  const std::size_t n = ctx.degree();
  const std::size_t top = ctx.max_depth();
  const int width = ctx.binomial_width();
  const RingElem message = encode(ctx, m, ctx.scale(), top);

  auto ternary = sample_ternary(n, prng);
  std::vector<std::int64_t> u_coeffs(ternary.begin(), ternary.end());
  const RingElem u = small_to_eval(ctx, top, u_coeffs);

  CkksCiphertext c;
  c.level = top;
  c.scale = ctx.scale();
  RingElem c0 = small_to_eval(ctx, top, sample_noise(n, width, prng));
  multiply_accumulate(c0, u, pk.b);
  // A constant polynomial evaluates to itself at every root.
  for (std::size_t j = 0; j <= top; ++j) {
    const Modulus& q = ctx.rns()->modulus(j);
    const std::uint64_t k = message.row(j)[0];
    for (auto& v : c0.row(j)) v = q.add(v, k);
  }
  RingElem c1 = small_to_eval(ctx, top, sample_noise(n, width, prng));
  multiply_accumulate(c1, u, pk.a);
  c.components.push_back(std::move(c0));
  c.components.push_back(std::move(c1));
  return c;
}

RingElem decrypt_to_ring(const CkksContext& ctx, const SecretKeyData& sk,
                         const CkksCiphertext& c) {
  if (c.components.size() < 2 || c.components.size() > 3) {
    throw Error(ErrorCode::kInvalidArgument, "ciphertext must have 2 or 3 components");
  }
  (void)ctx;
  RingElem m = c.components[0];
  multiply_accumulate(m, c.components[1], sk.eval);
  if (c.components.size() == 3) {
    RingElem s2 = sk.eval;
    s2.drop_to(c.level);
    s2 *= s2;
    multiply_accumulate(m, c.components[2], s2);
  }
  return m;
}

double decrypt(const CkksContext& ctx, const SecretKeyData& sk, const CkksCiphertext& c) {
  return decode(ctx, decrypt_to_ring(ctx, sk, c), c.scale);
}

CkksCiphertext subtract(const CkksContext&, const CkksCiphertext& a_in,
                        const CkksCiphertext& b_in, bool strict_levels) {
  auto [a, b] = aligned(a_in, b_in, strict_levels);
  check_scales(a.scale, b.scale);
  if (a.components.size() != b.components.size()) {
    throw Error(ErrorCode::kInvalidArgument, "component counts differ");
  }
  for (std::size_t i = 0; i < a.components.size(); ++i) a.components[i] -= b.components[i];
  return a;
}

CkksCiphertext tensor(const CkksContext&, const CkksCiphertext& a_in, const CkksCiphertext& b_in,
                      bool strict_levels) {
  auto [a, b] = aligned(a_in, b_in, strict_levels);
  if (a.components.size() != 2 || b.components.size() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "tensor needs 2-component operands");
  }
  CkksCiphertext out;
  out.level = a.level;
  out.scale = a.scale * b.scale;
  RingElem d0 = a.components[0];
  d0 *= b.components[0];
  RingElem d1 = a.components[0];
  d1 *= b.components[1];
  multiply_accumulate(d1, a.components[1], b.components[0]);
  RingElem d2 = a.components[1];
  d2 *= b.components[1];
  out.components = {std::move(d0), std::move(d1), std::move(d2)};
  return out;
}

CkksCiphertext relinearize(const CkksContext& ctx, const CkksCiphertext& c,
                           const RelinKeyData& rlk) {
  if (c.components.size() != 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "relinearize needs 3 components, got " + std::to_string(c.components.size()));
  }
  const auto& rns = *ctx.rns();
  const std::size_t n = ctx.degree();
  const std::size_t level = c.level;
  const int w = ctx.params().decomposition_bits;
  const std::uint64_t mask = (std::uint64_t{1} << w) - 1;
  if (rlk.parts.size() < level + 1) {
    throw Error(ErrorCode::kParamsMismatch, "relinearization key does not cover this level");
  }

  const RingElem c2 = c.components[2].in_form(Form::kCoefficient);
  RingElem acc0 = c.components[0];
  RingElem acc1 = c.components[1];
  // Products are summed unreduced in 128 bits: at most 16 digits of
  // 122-bit products fit, and Barrett reduction accepts any 128-bit input.
  std::vector<uint128_t> sum0(n);
  std::vector<uint128_t> sum1(n);
  std::vector<std::uint64_t> digit(n);
  for (std::size_t p = 0; p <= level; ++p) {
    const Modulus& q = rns.modulus(p);
    std::fill(sum0.begin(), sum0.end(), 0);
    std::fill(sum1.begin(), sum1.end(), 0);
    int terms = 0;
    auto flush = [&] {
      auto out0 = acc0.row(p);
      auto out1 = acc1.row(p);
      for (std::size_t i = 0; i < n; ++i) {
        out0[i] = q.add(out0[i], q.reduce(sum0[i]));
        out1[i] = q.add(out1[i], q.reduce(sum1[i]));
        sum0[i] = 0;
        sum1[i] = 0;
      }
      terms = 0;
    };
    for (std::size_t j = 0; j <= level; ++j) {
      auto source = c2.row(j);
      for (int k = 0; k < ctx.digit_count(j); ++k) {
        const auto& [key_b, key_a] = rlk.parts[j][static_cast<std::size_t>(k)];
        const int shift = w * k;
        for (std::size_t i = 0; i < n; ++i) digit[i] = (source[i] >> shift) & mask;
        rns.ntt(p).forward(digit);
        auto kb = key_b.row(p);
        auto ka = key_a.row(p);
        for (std::size_t i = 0; i < n; ++i) {
          sum0[i] += uint128_t{digit[i]} * kb[i];
          sum1[i] += uint128_t{digit[i]} * ka[i];
        }
        if (++terms == 16) flush();
      }
    }
    flush();
  }
  CkksCiphertext out;
  out.level = level;
  out.scale = c.scale;
  out.components = {std::move(acc0), std::move(acc1)};
  return out;
}

CkksCiphertext rescale(const CkksContext& ctx, const CkksCiphertext& c) {
  if (c.level == 0) throw Error(ErrorCode::kDepthExhausted, "cannot rescale at level 0");
  const auto& rns = *ctx.rns();
  const std::size_t n = ctx.degree();
  const std::size_t top = c.level;
  const Modulus& q_top = rns.modulus(top);
  const std::uint64_t half = q_top.value() >> 1;

  CkksCiphertext out;
  out.level = top - 1;
  out.scale = c.scale / static_cast<double>(q_top.value());
  std::vector<std::uint64_t> last(n);
  std::vector<std::uint64_t> lifted(n);
  for (const RingElem& comp : c.components) {
    RingElem r = comp;
    std::copy(comp.row(top).begin(), comp.row(top).end(), last.begin());
    rns.ntt(top).inverse(last);
    for (std::size_t j = 0; j < top; ++j) {
      const Modulus& q = rns.modulus(j);
      const std::uint64_t q_top_mod = q.reduce(q_top.value());
      for (std::size_t i = 0; i < n; ++i) {
        // Centered lift of the dropped residue, reduced mod q_j.
        std::uint64_t v = q.reduce(last[i]);
        lifted[i] = last[i] > half ? q.sub(v, q_top_mod) : v;
      }
      rns.ntt(j).forward(lifted);
      const std::uint64_t inv = rns.drop_inverse(top, j);
      const std::uint64_t inv_shoup = q.shoup(inv);
      auto row = r.row(j);
      for (std::size_t i = 0; i < n; ++i) {
        row[i] = q.mul_shoup(q.sub(row[i], lifted[i]), inv, inv_shoup);
      }
    }
    r.drop_to(top - 1);
    out.components.push_back(std::move(r));
  }
  return out;
}

CkksCiphertext multiply(const CkksContext& ctx, const CkksCiphertext& a,
                        const CkksCiphertext& b, const RelinKeyData& rlk, bool strict_levels) {
  if (a.level == 0 || b.level == 0) {
    throw Error(ErrorCode::kDepthExhausted, "no multiplicative depth left");
  }
  return rescale(ctx, relinearize(ctx, tensor(ctx, a, b, strict_levels), rlk));
}

CkksCiphertext multiply_scalar(const CkksContext& ctx, const CkksCiphertext& a, double k) {
  if (a.level == 0) throw Error(ErrorCode::kDepthExhausted, "no multiplicative depth left");
  if (!std::isfinite(k) || k == 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "scalar must be finite and nonzero");
  }
  const auto& rns = *ctx.rns();
  const double q_top = static_cast<double>(rns.modulus(a.level).value());
  const double k_int = std::nearbyint(k * q_top);
  if (k_int == 0.0 || std::fabs(k_int) >= 0x1p62) {
    throw Error(ErrorCode::kOutOfRange, "scalar magnitude not representable at this level");
  }
  const auto k_signed = static_cast<std::int64_t>(k_int);
  std::vector<std::uint64_t> residues(a.level + 1);
  for (std::size_t j = 0; j <= a.level; ++j) residues[j] = rns.modulus(j).from_signed(k_signed);
  CkksCiphertext scaled = a;
  for (auto& comp : scaled.components) comp.multiply_scalar(residues);
  scaled.scale = a.scale * (k_int / k);
  return rescale(ctx, scaled);
}

Bytes serialize_payload(const CkksContext& ctx, const CkksCiphertext& c) {
  const auto& rns = *ctx.rns();
  const std::size_t n = ctx.degree();
  ByteWriter w;
  w.reserve(1 + c.components.size() * n * (2 + (rns.product_bits(c.level) + 7) / 8));
  w.u8(static_cast<std::uint8_t>(c.components.size()));
  std::array<std::uint64_t, kMaxLevels> residues{};
  const WideUint& half = rns.half_product(c.level);
  const WideUint& product = rns.product(c.level);
  for (const RingElem& comp : c.components) {
    const RingElem coeffs = comp.in_form(Form::kCoefficient);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= c.level; ++j) residues[j] = coeffs.row(j)[i];
      WideUint x = rns.reconstruct(c.level, std::span(residues.data(), c.level + 1));
      bool negative = x > half;
      if (negative) {
        WideUint mag = product;
        mag.subtract(x);
        x = mag;
      }
      Bytes mag = x.to_bytes_be();
      w.u8(negative ? 1 : 0);
      w.u8(static_cast<std::uint8_t>(mag.size()));
      w.raw(mag);
    }
  }
  return std::move(w).take();
}

CkksCiphertext parse_payload(const CkksContext& ctx, std::size_t level, double scale,
                             ByteSpan payload) {
  if (level > ctx.max_depth()) {
    throw Error(ErrorCode::kParamsMismatch, "ciphertext level " + std::to_string(level) +
                                                " above max depth " +
                                                std::to_string(ctx.max_depth()));
  }
  if (!(scale > 0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::kMalformed, "ciphertext scale must be positive");
  }
  const auto& rns = *ctx.rns();
  const std::size_t n = ctx.degree();
  ByteReader in(payload);
  std::uint8_t count = in.u8();
  if (count != kPayloadComponents) {
    throw Error(ErrorCode::kMalformed,
                "expected 2 components, payload has " + std::to_string(count));
  }
  const WideUint& half = rns.half_product(level);
  CkksCiphertext c;
  c.level = level;
  c.scale = scale;
  for (int comp = 0; comp < count; ++comp) {
    RingElem r(ctx.rns(), level, Form::kCoefficient);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint8_t sign = in.u8();
      if (sign > 1) throw Error(ErrorCode::kMalformed, "bad coefficient sign byte");
      std::uint8_t len = in.u8();
      WideUint mag = WideUint::from_bytes_be(in.raw(len));
      if (mag > half) throw Error(ErrorCode::kMalformed, "coefficient exceeds the level modulus");
      for (std::size_t j = 0; j <= level; ++j) {
        const Modulus& q = rns.modulus(j);
        std::uint64_t v = mag.mod(q.value());
        r.row(j)[i] = sign ? q.neg(v) : v;
      }
    }
    r.to_evaluation();
    c.components.push_back(std::move(r));
  }
  in.expect_done("ckks ciphertext payload");
  return c;
}

Bytes serialize_secret_key(const CkksContext&, const SecretKeyData& sk) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(sk.coefficients.size()));
  for (std::int8_t v : sk.coefficients) w.u8(static_cast<std::uint8_t>(v));
  return std::move(w).take();
}

Bytes serialize_public_key(const CkksContext& ctx, const PublicKeyData& pk) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(ctx.max_depth()));
  write_rows(w, pk.b);
  write_rows(w, pk.a);
  return std::move(w).take();
}

Bytes serialize_relin_key(const CkksContext& ctx, const RelinKeyData& rlk) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(ctx.max_depth()));
  for (const auto& digits : rlk.parts) {
    w.u8(static_cast<std::uint8_t>(digits.size()));
    for (const auto& [b, a] : digits) {
      write_rows(w, b);
      write_rows(w, a);
    }
  }
  return std::move(w).take();
}

SecretKeyData parse_secret_key(const CkksContext& ctx, ByteSpan bytes) {
  ByteReader in(bytes);
  if (in.u32() != ctx.degree()) throw Error(ErrorCode::kParamsMismatch, "secret key degree");
  SecretKeyData sk;
  sk.coefficients.resize(ctx.degree());
  std::vector<std::int64_t> s(ctx.degree());
  for (std::size_t i = 0; i < ctx.degree(); ++i) {
    auto v = static_cast<std::int8_t>(in.u8());
    if (v < -1 || v > 1) throw Error(ErrorCode::kMalformed, "secret key is not ternary");
    sk.coefficients[i] = v;
    s[i] = v;
  }
  in.expect_done("ckks secret key");
  sk.eval = small_to_eval(ctx, ctx.max_depth(), s);
  return sk;
}

PublicKeyData parse_public_key(const CkksContext& ctx, ByteSpan bytes) {
  ByteReader in(bytes);
  if (in.u8() != ctx.max_depth()) throw Error(ErrorCode::kParamsMismatch, "public key depth");
  PublicKeyData pk;
  pk.b = read_rows(in, ctx, ctx.max_depth());
  pk.a = read_rows(in, ctx, ctx.max_depth());
  in.expect_done("ckks public key");
  return pk;
}

RelinKeyData parse_relin_key(const CkksContext& ctx, ByteSpan bytes) {
  ByteReader in(bytes);
  if (in.u8() != ctx.max_depth()) throw Error(ErrorCode::kParamsMismatch, "relin key depth");
  RelinKeyData rlk;
  rlk.parts.resize(ctx.max_depth() + 1);
  for (std::size_t j = 0; j <= ctx.max_depth(); ++j) {
    std::uint8_t digits = in.u8();
    if (digits != ctx.digit_count(j)) {
      throw Error(ErrorCode::kParamsMismatch, "relin key digit count");
    }
    for (int k = 0; k < digits; ++k) {
      RingElem b = read_rows(in, ctx, ctx.max_depth());
      RingElem a = read_rows(in, ctx, ctx.max_depth());
      rlk.parts[j].emplace_back(std::move(b), std::move(a));
    }
  }
  in.expect_done("ckks relin key");
  return rlk;
}

}  // namespace hesearch::ckks
