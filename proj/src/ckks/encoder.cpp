// Copyright 2025-present the hefuzz authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include "bigint.hpp"
#include "hefuzz/common.hpp"
#include "poly_ops.hpp"

namespace hefuzz::ckks {

namespace {

// Canonical embedding: slot j carries m(zeta^(2j+1)) for j < n/2; the other
// half of the odd powers are the conjugates. Encoding twists coefficients by
// zeta^t and runs a plain size-n FFT.
std::vector<int64_t> embed_to_coeffs(const Context& ctx,
                                     std::span<const double> values,
                                     double scale) {
  const size_t n = ctx.n();
  const size_t slots = ctx.slots();
  if (values.size() > slots) throw TooManySlots("too many values to encode");

  std::vector<std::complex<double>> u(n, {0.0, 0.0});
  for (size_t j = 0; j < values.size(); ++j) {
    u[j] = {values[j], 0.0};
    u[n - 1 - j] = {values[j], 0.0};  // conjugate of a real slot
  }
  ctx.embedding_inverse(u);

  std::vector<int64_t> coeffs(n);
  for (size_t t = 0; t < n; ++t) {
    double m = (u[t] * std::conj(ctx.zeta(t))).real() * scale;
    if (!(std::abs(m) < 4.6e18)) {  // ~2^62
      throw ScaleOverflow("encoded coefficient exceeds 2^62");
    }
    coeffs[t] = int64_t(std::llround(m));
  }
  return coeffs;
}

std::vector<std::complex<double>> coeffs_to_embedding(
    const Context& ctx, const std::vector<double>& coeffs) {
  const size_t n = ctx.n();
  std::vector<std::complex<double>> g(n);
  for (size_t t = 0; t < n; ++t) g[t] = coeffs[t] * ctx.zeta(t);
  ctx.embedding_forward(g);
  g.resize(ctx.slots());
  return g;
}

}  // namespace

namespace detail {

// Centered coefficients of a coefficient-form plaintext as doubles.
std::vector<double> centered_coeffs(const Context& ctx, const Plaintext& pt) {
  const size_t n = ctx.n();
  const CrtLevel& crt = ctx.crt(pt.level);
  const uint32_t comps = pt.level + 1;
  std::vector<double> out(n);
  std::vector<uint64_t> acc(crt.modulus.size() + 1);
  for (size_t i = 0; i < n; ++i) {
    std::fill(acc.begin(), acc.end(), 0);
    for (uint32_t c = 0; c < comps; ++c) {
      uint64_t y = kernels::mul_mod_shoup1(pt.poly.comp(c, n)[i],
                                           crt.hat_inv[c],
                                           crt.hat_inv_shoup[c], ctx.prime(c));
      bigint::mul_u64_acc(acc, crt.hat[c], y);
    }
    while (bigint::cmp(acc, crt.modulus) >= 0) {
      bigint::sub_in_place(acc, crt.modulus);
    }
    if (bigint::cmp(acc, crt.half) > 0) {
      bigint::Limbs neg = crt.modulus;
      neg.resize(acc.size());
      bigint::Limbs tmp = neg;
      bigint::sub_in_place(tmp, acc);
      out[i] = -bigint::to_double(tmp);
    } else {
      out[i] = bigint::to_double(acc);
    }
  }
  return out;
}

// Embedding values without dividing by the scale (noise measurement path).
std::vector<std::complex<double>> raw_embedding(const Context& ctx,
                                                const Plaintext& pt) {
  Plaintext copy;
  const Plaintext* src = &pt;
  if (pt.poly.ntt_form) {
    copy = pt;
    for (uint32_t c = 0; c <= pt.level; ++c) {
      ctx.ntt_inverse(copy.poly.comp(c, ctx.n()), c);
    }
    copy.poly.ntt_form = false;
    src = &copy;
  }
  return coeffs_to_embedding(ctx, centered_coeffs(ctx, *src));
}

}  // namespace detail

Plaintext encode(const Context& ctx, std::span<const double> values,
                 double scale, uint32_t level) {
  if (level > ctx.top_level()) throw LevelMismatch("encode level out of range");
  auto coeffs = embed_to_coeffs(ctx, values, scale);
  Plaintext pt;
  pt.level = level;
  pt.scale = scale;
  pt.poly = detail::coeffs_to_ntt(ctx, coeffs, level + 1);
  double max_abs = 0.0;
  for (double v : values) max_abs = std::max(max_abs, std::abs(v));
  // + n covers the canonical norm of the rounding error.
  pt.can_norm = scale * max_abs + double(ctx.n());
  return pt;
}

Plaintext encode_const(const Context& ctx, double value, double scale,
                       uint32_t level) {
  if (level > ctx.top_level()) throw LevelMismatch("encode level out of range");
  double m = value * scale;
  if (!(std::abs(m) < 4.6e18)) throw ScaleOverflow("constant exceeds 2^62");
  int64_t coeff = int64_t(std::llround(m));
  Plaintext pt;
  pt.level = level;
  pt.scale = scale;
  pt.can_norm = std::abs(m) + 1.0;
  pt.poly = detail::make_poly(ctx, level + 1, true);
  // Constant polynomial: every NTT coefficient equals the constant term.
  const size_t n = ctx.n();
  for (uint32_t c = 0; c <= level; ++c) {
    uint64_t r = detail::signed_residue(coeff, ctx.prime(c));
    uint64_t* dst = pt.poly.comp(c, n);
    std::fill(dst, dst + n, r);
  }
  return pt;
}

std::vector<double> decode(const Context& ctx, const Plaintext& pt) {
  auto embedding = detail::raw_embedding(ctx, pt);
  double inv = 1.0 / pt.scale;
  std::vector<double> values(embedding.size());
  for (size_t j = 0; j < values.size(); ++j) {
    values[j] = embedding[j].real() * inv;
  }
  return values;
}

}  // namespace hefuzz::ckks
