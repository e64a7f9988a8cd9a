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

#pragma once

#include "hefuzz/ckks/engine.hpp"

namespace hefuzz::ckks::detail {

inline RnsPoly make_poly(const Context& ctx, uint32_t components, bool ntt) {
  RnsPoly p;
  p.components = components;
  p.ntt_form = ntt;
  p.data.assign(size_t(components) * ctx.n(), 0);
  return p;
}

// out = (out + a*b) mod q, elementwise, arbitrary operands (Barrett).
inline void pointwise_mul_acc(uint64_t* out, const uint64_t* a,
                              const uint64_t* b, size_t n, uint64_t q,
                              const kernels::BarrettRatio& ratio) {
  for (size_t i = 0; i < n; ++i) {
    uint64_t t = kernels::mul_mod_barrett1(a[i], b[i], q, ratio);
    out[i] = kernels::add_mod1(out[i], t, q);
  }
}

inline void pointwise_mul(uint64_t* out, const uint64_t* a, const uint64_t* b,
                          size_t n, uint64_t q,
                          const kernels::BarrettRatio& ratio) {
  for (size_t i = 0; i < n; ++i) {
    out[i] = kernels::mul_mod_barrett1(a[i], b[i], q, ratio);
  }
}

// Residue of a signed integer coefficient.
inline uint64_t signed_residue(int64_t v, uint64_t q) {
  if (v >= 0) return uint64_t(v) % q;
  uint64_t m = uint64_t(-v) % q;
  return m == 0 ? 0 : q - m;
}

// Coefficient-domain signed integers -> NTT-form poly over `components`
// chain primes (optionally the special prime appended when components ==
// chain_count + 1).
RnsPoly coeffs_to_ntt(const Context& ctx, const std::vector<int64_t>& coeffs,
                      uint32_t components);

RnsPoly sample_uniform_ntt(const Context& ctx, uint32_t components, Prng& rng);
RnsPoly sample_gaussian_ntt(const Context& ctx, uint32_t components, Prng& rng);
// Each coefficient 0 with prob 1/2, else +-1.
RnsPoly sample_zo_ntt(const Context& ctx, uint32_t components, Prng& rng);
RnsPoly sample_hwt_ntt(const Context& ctx, uint32_t components, uint32_t weight,
                       Prng& rng);

// Relinearize a degree-2 component at `level` into a (u0, u1) pair.
// acc2 must be NTT form over chain primes 0..level.
std::pair<RnsPoly, RnsPoly> key_switch(const Context& ctx, const RnsPoly& acc2,
                                       uint32_t level, const RelinKey& rlk);

// Centered coefficients of a coefficient-form plaintext as doubles.
std::vector<double> centered_coeffs(const Context& ctx, const Plaintext& pt);
// Embedding values without dividing by the scale (noise measurement path).
std::vector<std::complex<double>> raw_embedding(const Context& ctx,
                                                const Plaintext& pt);

Prng& thread_rng();

}  // namespace hefuzz::ckks::detail
