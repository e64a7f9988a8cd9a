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

#include <atomic>
#include <cmath>

#include "hefuzz/common.hpp"
#include "poly_ops.hpp"

namespace hefuzz::ckks {

namespace detail {

Prng& thread_rng() {
  thread_local Prng rng = Prng::nondeterministic();
  return rng;
}

RnsPoly coeffs_to_ntt(const Context& ctx, const std::vector<int64_t>& coeffs,
                      uint32_t components) {
  const size_t n = ctx.n();
  RnsPoly p = make_poly(ctx, components, false);
  for (uint32_t c = 0; c < components; ++c) {
    uint64_t q = ctx.prime(c);
    uint64_t* dst = p.comp(c, n);
    for (size_t i = 0; i < n; ++i) dst[i] = signed_residue(coeffs[i], q);
    ctx.ntt_forward(dst, c);
  }
  p.ntt_form = true;
  return p;
}

RnsPoly sample_uniform_ntt(const Context& ctx, uint32_t components,
                           Prng& rng) {
  const size_t n = ctx.n();
  RnsPoly p = make_poly(ctx, components, true);
  for (uint32_t c = 0; c < components; ++c) {
    uint64_t q = ctx.prime(c);
    uint64_t* dst = p.comp(c, n);
    for (size_t i = 0; i < n; ++i) dst[i] = rng.next_below(q);
  }
  return p;
}

RnsPoly sample_gaussian_ntt(const Context& ctx, uint32_t components,
                            Prng& rng) {
  const size_t n = ctx.n();
  std::vector<int64_t> coeffs(n);
  for (auto& v : coeffs) {
    v = int64_t(std::llround(rng.next_gaussian(ctx.params().error_stddev)));
  }
  return coeffs_to_ntt(ctx, coeffs, components);
}

RnsPoly sample_zo_ntt(const Context& ctx, uint32_t components, Prng& rng) {
  const size_t n = ctx.n();
  std::vector<int64_t> coeffs(n);
  for (auto& v : coeffs) {
    uint64_t bits = rng.next_below(4);
    v = bits == 0 ? 1 : bits == 1 ? -1 : 0;
  }
  return coeffs_to_ntt(ctx, coeffs, components);
}

RnsPoly sample_hwt_ntt(const Context& ctx, uint32_t components,
                       uint32_t weight, Prng& rng) {
  const size_t n = ctx.n();
  std::vector<int64_t> coeffs(n, 0);
  uint32_t placed = 0;
  while (placed < weight) {
    size_t pos = size_t(rng.next_below(n));
    if (coeffs[pos] != 0) continue;
    coeffs[pos] = (rng.next_u64() & 1) ? 1 : -1;
    ++placed;
  }
  return coeffs_to_ntt(ctx, coeffs, components);
}

}  // namespace detail

namespace {

std::atomic<uint64_t> g_decrypt_count{0};

}  // namespace

uint64_t decrypt_invocations() { return g_decrypt_count.load(); }

KeySet keygen(const Context& ctx, uint64_t seed) {
  using namespace detail;
  const size_t n = ctx.n();
  const uint32_t chain = uint32_t(ctx.chain_count());
  const uint32_t full = chain + 1;  // chain + special
  Prng rng(seed);

  KeySet keys;
  keys.secret.s =
      sample_hwt_ntt(ctx, full, ctx.params().secret_hamming_weight, rng);

  // pk = (b, a), b = -a*s + e over the chain primes.
  keys.pub.a = sample_uniform_ntt(ctx, chain, rng);
  RnsPoly e = sample_gaussian_ntt(ctx, chain, rng);
  keys.pub.b = make_poly(ctx, chain, true);
  for (uint32_t c = 0; c < chain; ++c) {
    const auto& tb = ctx.tables(c);
    uint64_t* b = keys.pub.b.comp(c, n);
    const uint64_t* a = keys.pub.a.comp(c, n);
    const uint64_t* s = keys.secret.s.comp(c, n);
    const uint64_t* ec = e.comp(c, n);
    for (size_t i = 0; i < n; ++i) {
      uint64_t as = kernels::mul_mod_barrett1(a[i], s[i], tb.q, tb.ratio);
      b[i] = kernels::add_mod1(tb.q - as, ec[i], tb.q);
    }
  }

  // Hybrid key-switch digits: one pair per chain prime, spanning chain +
  // special. Digit j additionally carries (P mod q_j) * s^2 in its own
  // component, which makes the per-residue decomposition level-independent.
  keys.relin.a.resize(chain);
  keys.relin.b.resize(chain);
  for (uint32_t j = 0; j < chain; ++j) {
    keys.relin.a[j] = sample_uniform_ntt(ctx, full, rng);
    RnsPoly ej = sample_gaussian_ntt(ctx, full, rng);
    keys.relin.b[j] = make_poly(ctx, full, true);
    for (uint32_t c = 0; c < full; ++c) {
      const auto& tb = ctx.tables(c);
      uint64_t* b = keys.relin.b[j].comp(c, n);
      const uint64_t* a = keys.relin.a[j].comp(c, n);
      const uint64_t* s = keys.secret.s.comp(c, n);
      const uint64_t* ec = ej.comp(c, n);
      for (size_t i = 0; i < n; ++i) {
        uint64_t as = kernels::mul_mod_barrett1(a[i], s[i], tb.q, tb.ratio);
        b[i] = kernels::add_mod1(tb.q - as, ec[i], tb.q);
      }
    }
    const auto& tbj = ctx.tables(j);
    uint64_t p_mod = ctx.special_prime() % tbj.q;
    uint64_t p_shoup = kernels::shoup_precompute(p_mod, tbj.q);
    uint64_t* bj = keys.relin.b[j].comp(j, n);
    const uint64_t* s = keys.secret.s.comp(j, n);
    for (size_t i = 0; i < n; ++i) {
      uint64_t s2 = kernels::mul_mod_barrett1(s[i], s[i], tbj.q, tbj.ratio);
      uint64_t ps2 = kernels::mul_mod_shoup1(s2, p_mod, p_shoup, tbj.q);
      bj[i] = kernels::add_mod1(bj[i], ps2, tbj.q);
    }
  }
  return keys;
}

Ciphertext encrypt(const Context& ctx, const PublicKey& pk,
                   const Plaintext& pt, Prng* rng) {
  using namespace detail;
  if (!pt.poly.ntt_form) throw InvalidParams("plaintext must be NTT form");
  Prng& r = rng != nullptr ? *rng : thread_rng();
  const size_t n = ctx.n();
  const uint32_t comps = pt.level + 1;

  RnsPoly u = sample_zo_ntt(ctx, comps, r);
  RnsPoly e0 = sample_gaussian_ntt(ctx, comps, r);
  RnsPoly e1 = sample_gaussian_ntt(ctx, comps, r);

  Ciphertext ct;
  ct.level = pt.level;
  ct.scale = pt.scale;
  ct.value_bound = pt.can_norm;
  ct.noise_bound = noise_clean(ctx.params());
  ct.c0 = make_poly(ctx, comps, true);
  ct.c1 = make_poly(ctx, comps, true);
  for (uint32_t c = 0; c < comps; ++c) {
    const auto& tb = ctx.tables(c);
    const uint64_t* b = pk.b.comp(c, n);
    const uint64_t* a = pk.a.comp(c, n);
    const uint64_t* uc = u.comp(c, n);
    const uint64_t* m = pt.poly.comp(c, n);
    uint64_t* c0 = ct.c0.comp(c, n);
    uint64_t* c1 = ct.c1.comp(c, n);
    const uint64_t* e0c = e0.comp(c, n);
    const uint64_t* e1c = e1.comp(c, n);
    for (size_t i = 0; i < n; ++i) {
      uint64_t bu = kernels::mul_mod_barrett1(b[i], uc[i], tb.q, tb.ratio);
      c0[i] = kernels::add_mod1(kernels::add_mod1(bu, e0c[i], tb.q), m[i], tb.q);
      uint64_t au = kernels::mul_mod_barrett1(a[i], uc[i], tb.q, tb.ratio);
      c1[i] = kernels::add_mod1(au, e1c[i], tb.q);
    }
  }
  return ct;
}

Plaintext decrypt(const Context& ctx, const SecretKey& sk,
                  const Ciphertext& ct) {
  g_decrypt_count.fetch_add(1, std::memory_order_relaxed);
  const size_t n = ctx.n();
  const uint32_t comps = ct.level + 1;
  Plaintext pt;
  pt.level = ct.level;
  pt.scale = ct.scale;
  pt.poly = detail::make_poly(ctx, comps, false);
  for (uint32_t c = 0; c < comps; ++c) {
    const auto& tb = ctx.tables(c);
    const uint64_t* c0 = ct.c0.comp(c, n);
    const uint64_t* c1 = ct.c1.comp(c, n);
    const uint64_t* s = sk.s.comp(c, n);
    uint64_t* m = pt.poly.comp(c, n);
    for (size_t i = 0; i < n; ++i) {
      uint64_t c1s = kernels::mul_mod_barrett1(c1[i], s[i], tb.q, tb.ratio);
      m[i] = kernels::add_mod1(c0[i], c1s, tb.q);
    }
    ctx.ntt_inverse(m, c);
  }
  return pt;
}

std::vector<double> decrypt_values(const Context& ctx, const SecretKey& sk,
                                   const Ciphertext& ct, size_t count) {
  auto values = decode(ctx, decrypt(ctx, sk, ct));
  values.resize(count);
  return values;
}

}  // namespace hefuzz::ckks
