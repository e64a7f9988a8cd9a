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
#include <cstring>

#include "hefuzz/common.hpp"
#include "poly_ops.hpp"

namespace hefuzz::ckks {

namespace {

using detail::make_poly;

void check_add_compatible(const Ciphertext& a, const Ciphertext& b) {
  if (a.level != b.level) throw LevelMismatch("add: level mismatch");
  if (a.scale != b.scale) throw ScaleMismatch("add: scale mismatch");
}

// Divide every component by the top active prime with centered rounding;
// level drops by one, scale divides by the dropped prime.
void rescale_poly(const Context& ctx, RnsPoly& poly, uint32_t level) {
  const size_t n = ctx.n();
  const uint64_t q_drop = ctx.prime(level);
  const uint64_t half = q_drop / 2;

  std::vector<uint64_t> last(poly.comp(level, n), poly.comp(level, n) + n);
  ctx.ntt_inverse(last.data(), level);

  std::vector<uint64_t> tmp(n);
  for (uint32_t c = 0; c < level; ++c) {
    const uint64_t q = ctx.prime(c);
    const uint64_t drop_mod = ctx.drop_mod(level, c);
    for (size_t i = 0; i < n; ++i) {
      uint64_t d = last[i];
      uint64_t r = d % q;
      // centered lift of d mod q_drop
      if (d > half) r = kernels::sub_mod1(r, drop_mod, q);
      tmp[i] = r;
    }
    ctx.ntt_forward(tmp.data(), c);
    uint64_t* dst = poly.comp(c, n);
    kernels::active().sub_mod(dst, dst, tmp.data(), n, q);
    kernels::active().mul_mod_shoup(dst, dst, n, ctx.drop_inv(level, c),
                                    ctx.drop_inv_shoup(level, c), q);
  }
  poly.data.resize(size_t(level) * n);
  poly.components = level;
}

}  // namespace

namespace detail {

std::pair<RnsPoly, RnsPoly> key_switch(const Context& ctx, const RnsPoly& acc2,
                                       uint32_t level, const RelinKey& rlk) {
  const size_t n = ctx.n();
  const uint32_t comps = level + 1;
  const size_t sp = ctx.chain_count();  // special prime index
  const auto& sp_tb = ctx.tables(sp);

  if (rlk.b.empty()) throw InvalidParams("relinearization key missing");

  // Digits in coefficient form.
  std::vector<std::vector<uint64_t>> digits(comps);
  for (uint32_t j = 0; j < comps; ++j) {
    digits[j].assign(acc2.comp(j, n), acc2.comp(j, n) + n);
    ctx.ntt_inverse(digits[j].data(), j);
  }

  RnsPoly u0 = make_poly(ctx, comps, true);
  RnsPoly u1 = make_poly(ctx, comps, true);
  std::vector<uint64_t> sp0(n, 0), sp1(n, 0);

  std::vector<uint64_t> lifted(n);
  for (uint32_t j = 0; j < comps; ++j) {
    const uint64_t qj = ctx.prime(j);
    // chain targets
    for (uint32_t t = 0; t < comps; ++t) {
      const auto& tb = ctx.tables(t);
      if (t == j) {
        std::memcpy(lifted.data(), digits[j].data(), n * sizeof(uint64_t));
      } else if (qj >= tb.q) {
        for (size_t i = 0; i < n; ++i) lifted[i] = digits[j][i] % tb.q;
      } else {
        std::memcpy(lifted.data(), digits[j].data(), n * sizeof(uint64_t));
      }
      ctx.ntt_forward(lifted.data(), t);
      detail::pointwise_mul_acc(u0.comp(t, n), lifted.data(),
                                rlk.b[j].comp(t, n), n, tb.q, tb.ratio);
      detail::pointwise_mul_acc(u1.comp(t, n), lifted.data(),
                                rlk.a[j].comp(t, n), n, tb.q, tb.ratio);
    }
    // special target
    for (size_t i = 0; i < n; ++i) lifted[i] = digits[j][i] % sp_tb.q;
    ctx.ntt_forward(lifted.data(), sp);
    detail::pointwise_mul_acc(sp0.data(), lifted.data(), rlk.b[j].comp(sp, n),
                              n, sp_tb.q, sp_tb.ratio);
    detail::pointwise_mul_acc(sp1.data(), lifted.data(), rlk.a[j].comp(sp, n),
                              n, sp_tb.q, sp_tb.ratio);
  }

  // Mod-down: subtract the centered special residue and divide by P.
  const uint64_t p_half = ctx.special_prime() / 2;
  std::vector<uint64_t> tmp(n);
  auto mod_down = [&](std::vector<uint64_t>& sp_comp, RnsPoly& u) {
    ctx.ntt_inverse(sp_comp.data(), sp);
    for (uint32_t c = 0; c < comps; ++c) {
      const uint64_t q = ctx.prime(c);
      const uint64_t p_mod = ctx.special_mod(c);
      for (size_t i = 0; i < n; ++i) {
        uint64_t w = sp_comp[i];
        uint64_t r = w % q;
        if (w > p_half) r = kernels::sub_mod1(r, p_mod, q);
        tmp[i] = r;
      }
      ctx.ntt_forward(tmp.data(), c);
      uint64_t* dst = u.comp(c, n);
      kernels::active().sub_mod(dst, dst, tmp.data(), n, q);
      kernels::active().mul_mod_shoup(dst, dst, n, ctx.special_inv(c),
                                      ctx.special_inv_shoup(c), q);
    }
  };
  mod_down(sp0, u0);
  mod_down(sp1, u1);
  return {std::move(u0), std::move(u1)};
}

}  // namespace detail

Ciphertext add(const Context& ctx, const Ciphertext& a, const Ciphertext& b) {
  check_add_compatible(a, b);
  const size_t n = ctx.n();
  Ciphertext out = a;
  for (uint32_t c = 0; c <= a.level; ++c) {
    uint64_t q = ctx.prime(c);
    kernels::active().add_mod(out.c0.comp(c, n), a.c0.comp(c, n),
                              b.c0.comp(c, n), n, q);
    kernels::active().add_mod(out.c1.comp(c, n), a.c1.comp(c, n),
                              b.c1.comp(c, n), n, q);
  }
  out.value_bound = a.value_bound + b.value_bound;
  out.noise_bound = a.noise_bound + b.noise_bound;
  return out;
}

Ciphertext sub(const Context& ctx, const Ciphertext& a, const Ciphertext& b) {
  check_add_compatible(a, b);
  const size_t n = ctx.n();
  Ciphertext out = a;
  for (uint32_t c = 0; c <= a.level; ++c) {
    uint64_t q = ctx.prime(c);
    kernels::active().sub_mod(out.c0.comp(c, n), a.c0.comp(c, n),
                              b.c0.comp(c, n), n, q);
    kernels::active().sub_mod(out.c1.comp(c, n), a.c1.comp(c, n),
                              b.c1.comp(c, n), n, q);
  }
  out.value_bound = a.value_bound + b.value_bound;
  out.noise_bound = a.noise_bound + b.noise_bound;
  return out;
}

Ciphertext add_plain(const Context& ctx, const Ciphertext& ct,
                     const Plaintext& pt) {
  if (ct.level != pt.level) throw LevelMismatch("add_plain: level mismatch");
  if (ct.scale != pt.scale) throw ScaleMismatch("add_plain: scale mismatch");
  const size_t n = ctx.n();
  Ciphertext out = ct;
  for (uint32_t c = 0; c <= ct.level; ++c) {
    kernels::active().add_mod(out.c0.comp(c, n), ct.c0.comp(c, n),
                              pt.poly.comp(c, n), n, ctx.prime(c));
  }
  out.value_bound = ct.value_bound + pt.can_norm;
  return out;
}

Ciphertext add_plain(const Context& ctx, const Ciphertext& ct, double value) {
  return add_plain(ctx, ct, encode_const(ctx, value, ct.scale, ct.level));
}

Ciphertext rescale(const Context& ctx, const Ciphertext& ct) {
  if (ct.level == 0) throw LevelExhausted("rescale at level 0");
  Ciphertext out = ct;
  rescale_poly(ctx, out.c0, ct.level);
  rescale_poly(ctx, out.c1, ct.level);
  const double q = ctx.prime_d(ct.level);
  out.level = ct.level - 1;
  out.scale = ct.scale / q;
  out.value_bound = ct.value_bound / q;
  out.noise_bound = ct.noise_bound / q + noise_scale(ctx.params());
  return out;
}

Ciphertext drop_to_level(const Context& ctx, const Ciphertext& ct,
                         uint32_t level) {
  if (level > ct.level) throw LevelMismatch("cannot raise a ciphertext level");
  const size_t n = ctx.n();
  Ciphertext out = ct;
  out.level = level;
  out.c0.data.resize(size_t(level + 1) * n);
  out.c0.components = level + 1;
  out.c1.data.resize(size_t(level + 1) * n);
  out.c1.components = level + 1;
  return out;
}

namespace {

// Scalar multiplier encoded at the engine scale: residues of round(v*scale).
struct ScalarPlain {
  int64_t integer = 0;
  double can_norm = 0.0;
};

ScalarPlain scalar_plain(const Context& ctx, double value) {
  double m = value * ctx.params().scale;
  if (!(std::abs(m) < 4.6e18)) throw ScaleOverflow("constant exceeds 2^62");
  ScalarPlain out;
  out.integer = int64_t(std::llround(m));
  out.can_norm = std::abs(m) + 1.0;
  return out;
}

void check_mul_headroom(const Context& ctx, double new_scale, uint32_t level) {
  if (new_scale * 4.0 >= ctx.level_modulus_d(level)) {
    throw ScaleOverflow("scale exceeds the active modulus");
  }
}

Ciphertext mul_plain_no_rescale(const Context& ctx, const Ciphertext& ct,
                                const ScalarPlain& sp) {
  const size_t n = ctx.n();
  Ciphertext out = ct;
  for (uint32_t c = 0; c <= ct.level; ++c) {
    uint64_t q = ctx.prime(c);
    uint64_t w = detail::signed_residue(sp.integer, q);
    uint64_t ws = kernels::shoup_precompute(w, q);
    kernels::active().mul_mod_shoup(out.c0.comp(c, n), ct.c0.comp(c, n), n, w,
                                    ws, q);
    kernels::active().mul_mod_shoup(out.c1.comp(c, n), ct.c1.comp(c, n), n, w,
                                    ws, q);
  }
  out.scale = ct.scale * ctx.params().scale;
  out.value_bound = ct.value_bound * sp.can_norm;
  out.noise_bound = ct.noise_bound * sp.can_norm;
  return out;
}

}  // namespace

Ciphertext mul_plain(const Context& ctx, const Ciphertext& ct, double value) {
  if (ct.level == 0) throw LevelExhausted("mul_plain at level 0");
  ScalarPlain sp = scalar_plain(ctx, value);
  Ciphertext prod = mul_plain_no_rescale(ctx, ct, sp);
  check_mul_headroom(ctx, prod.scale, prod.level);
  return rescale(ctx, prod);
}

Ciphertext mul_plain(const Context& ctx, const Ciphertext& ct,
                     const Plaintext& pt) {
  if (ct.level == 0) throw LevelExhausted("mul_plain at level 0");
  if (ct.level != pt.level) throw LevelMismatch("mul_plain: level mismatch");
  const size_t n = ctx.n();
  Ciphertext prod = ct;
  for (uint32_t c = 0; c <= ct.level; ++c) {
    const auto& tb = ctx.tables(c);
    detail::pointwise_mul(prod.c0.comp(c, n), ct.c0.comp(c, n),
                          pt.poly.comp(c, n), n, tb.q, tb.ratio);
    detail::pointwise_mul(prod.c1.comp(c, n), ct.c1.comp(c, n),
                          pt.poly.comp(c, n), n, tb.q, tb.ratio);
  }
  prod.scale = ct.scale * pt.scale;
  prod.value_bound = ct.value_bound * pt.can_norm;
  prod.noise_bound = ct.noise_bound * pt.can_norm;
  check_mul_headroom(ctx, prod.scale, prod.level);
  return rescale(ctx, prod);
}

Ciphertext mul(const Context& ctx, const Ciphertext& a, const Ciphertext& b,
               const RelinKey& rlk) {
  if (a.level != b.level) throw LevelMismatch("mul: level mismatch");
  if (a.level == 0) throw LevelExhausted("mul at level 0");
  const size_t n = ctx.n();
  const uint32_t comps = a.level + 1;

  RnsPoly t0 = make_poly(ctx, comps, true);
  RnsPoly t1 = make_poly(ctx, comps, true);
  RnsPoly t2 = make_poly(ctx, comps, true);
  for (uint32_t c = 0; c < comps; ++c) {
    const auto& tb = ctx.tables(c);
    detail::pointwise_mul(t0.comp(c, n), a.c0.comp(c, n), b.c0.comp(c, n), n,
                          tb.q, tb.ratio);
    detail::pointwise_mul_acc(t1.comp(c, n), a.c0.comp(c, n), b.c1.comp(c, n),
                              n, tb.q, tb.ratio);
    detail::pointwise_mul_acc(t1.comp(c, n), a.c1.comp(c, n), b.c0.comp(c, n),
                              n, tb.q, tb.ratio);
    detail::pointwise_mul(t2.comp(c, n), a.c1.comp(c, n), b.c1.comp(c, n), n,
                          tb.q, tb.ratio);
  }

  auto [u0, u1] = detail::key_switch(ctx, t2, a.level, rlk);
  Ciphertext prod;
  prod.level = a.level;
  prod.scale = a.scale * b.scale;
  prod.c0 = std::move(t0);
  prod.c1 = std::move(t1);
  for (uint32_t c = 0; c < comps; ++c) {
    uint64_t q = ctx.prime(c);
    kernels::active().add_mod(prod.c0.comp(c, n), prod.c0.comp(c, n),
                              u0.comp(c, n), n, q);
    kernels::active().add_mod(prod.c1.comp(c, n), prod.c1.comp(c, n),
                              u1.comp(c, n), n, q);
  }
  prod.value_bound = a.value_bound * b.value_bound;
  double q_over_p = ctx.level_modulus_d(a.level) / double(ctx.special_prime());
  prod.noise_bound = a.value_bound * b.noise_bound +
                     b.value_bound * a.noise_bound +
                     a.noise_bound * b.noise_bound +
                     noise_mult(ctx.params(), q_over_p);
  check_mul_headroom(ctx, prod.scale, prod.level);
  return rescale(ctx, prod);
}

Ciphertext dot_ct_pt(const Context& ctx, std::span<const Ciphertext> cts,
                     std::span<const double> plains) {
  if (cts.size() != plains.size() || cts.empty()) {
    throw DimensionMismatch("dot_ct_pt: length mismatch");
  }
  const uint32_t level = cts[0].level;
  const double scale = cts[0].scale;
  if (level == 0) throw LevelExhausted("dot_ct_pt at level 0");
  const size_t n = ctx.n();

  Ciphertext acc;
  acc.level = level;
  acc.scale = scale * ctx.params().scale;
  acc.c0 = make_poly(ctx, level + 1, true);
  acc.c1 = make_poly(ctx, level + 1, true);
  acc.value_bound = 0.0;
  acc.noise_bound = 0.0;
  for (size_t i = 0; i < cts.size(); ++i) {
    const Ciphertext& ct = cts[i];
    if (ct.level != level) throw LevelMismatch("dot_ct_pt: level mismatch");
    if (ct.scale != scale) throw ScaleMismatch("dot_ct_pt: scale mismatch");
    ScalarPlain sp = scalar_plain(ctx, plains[i]);
    for (uint32_t c = 0; c <= level; ++c) {
      uint64_t q = ctx.prime(c);
      uint64_t w = detail::signed_residue(sp.integer, q);
      uint64_t ws = kernels::shoup_precompute(w, q);
      kernels::active().mac_mod_shoup(acc.c0.comp(c, n), ct.c0.comp(c, n), n,
                                      w, ws, q);
      kernels::active().mac_mod_shoup(acc.c1.comp(c, n), ct.c1.comp(c, n), n,
                                      w, ws, q);
    }
    acc.value_bound += ct.value_bound * sp.can_norm;
    acc.noise_bound += ct.noise_bound * sp.can_norm;
  }
  check_mul_headroom(ctx, acc.scale, acc.level);
  return rescale(ctx, acc);
}

Ciphertext dot_ct_ct(const Context& ctx, std::span<const Ciphertext> a,
                     std::span<const Ciphertext> b, const RelinKey& rlk) {
  if (a.size() != b.size() || a.empty()) {
    throw DimensionMismatch("dot_ct_ct: length mismatch");
  }
  const uint32_t level = a[0].level;
  if (level == 0) throw LevelExhausted("dot_ct_ct at level 0");
  const size_t n = ctx.n();
  const uint32_t comps = level + 1;
  const double scale = a[0].scale * b[0].scale;

  RnsPoly t0 = make_poly(ctx, comps, true);
  RnsPoly t1 = make_poly(ctx, comps, true);
  RnsPoly t2 = make_poly(ctx, comps, true);
  double nu = 0.0;
  double noise_mu = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].level != level || b[i].level != level) {
      throw LevelMismatch("dot_ct_ct: level mismatch");
    }
    if (a[i].scale * b[i].scale != scale) {
      throw ScaleMismatch("dot_ct_ct: scale mismatch");
    }
    for (uint32_t c = 0; c < comps; ++c) {
      const auto& tb = ctx.tables(c);
      detail::pointwise_mul_acc(t0.comp(c, n), a[i].c0.comp(c, n),
                                b[i].c0.comp(c, n), n, tb.q, tb.ratio);
      detail::pointwise_mul_acc(t1.comp(c, n), a[i].c0.comp(c, n),
                                b[i].c1.comp(c, n), n, tb.q, tb.ratio);
      detail::pointwise_mul_acc(t1.comp(c, n), a[i].c1.comp(c, n),
                                b[i].c0.comp(c, n), n, tb.q, tb.ratio);
      detail::pointwise_mul_acc(t2.comp(c, n), a[i].c1.comp(c, n),
                                b[i].c1.comp(c, n), n, tb.q, tb.ratio);
    }
    nu += a[i].value_bound * b[i].value_bound;
    noise_mu += a[i].value_bound * b[i].noise_bound +
                b[i].value_bound * a[i].noise_bound +
                a[i].noise_bound * b[i].noise_bound;
  }

  auto [u0, u1] = detail::key_switch(ctx, t2, level, rlk);
  Ciphertext acc;
  acc.level = level;
  acc.scale = scale;
  acc.c0 = std::move(t0);
  acc.c1 = std::move(t1);
  for (uint32_t c = 0; c < comps; ++c) {
    uint64_t q = ctx.prime(c);
    kernels::active().add_mod(acc.c0.comp(c, n), acc.c0.comp(c, n),
                              u0.comp(c, n), n, q);
    kernels::active().add_mod(acc.c1.comp(c, n), acc.c1.comp(c, n),
                              u1.comp(c, n), n, q);
  }
  double q_over_p = ctx.level_modulus_d(level) / double(ctx.special_prime());
  acc.value_bound = nu;
  acc.noise_bound = noise_mu + noise_mult(ctx.params(), q_over_p);
  check_mul_headroom(ctx, acc.scale, acc.level);
  return rescale(ctx, acc);
}

NoiseReport measure_noise(const Context& ctx, const SecretKey& sk,
                          const Ciphertext& ct,
                          std::span<const double> expected) {
  Plaintext pt = decrypt(ctx, sk, ct);
  auto embedding = detail::raw_embedding(ctx, pt);
  NoiseReport report;
  report.bound = ct.noise_bound;
  for (size_t j = 0; j < embedding.size(); ++j) {
    double want = j < expected.size() ? expected[j] * ct.scale : 0.0;
    double dev = std::abs(embedding[j] - std::complex<double>(want, 0.0));
    report.measured = std::max(report.measured, dev);
  }
  return report;
}

}  // namespace hefuzz::ckks
