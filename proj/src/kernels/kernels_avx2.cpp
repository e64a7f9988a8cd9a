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

#include "hefuzz/kernels.hpp"

#if defined(__x86_64__)

#include <immintrin.h>

namespace hefuzz::kernels {

namespace {

// 64x64 -> high 64 via four 32x32 partial products (AVX2 has no mulhi_epu64).
inline __m256i mulhi_epu64(__m256i a, __m256i b) {
  const __m256i lo_mask = _mm256_set1_epi64x(0xFFFFFFFFLL);
  __m256i a_hi = _mm256_srli_epi64(a, 32);
  __m256i b_hi = _mm256_srli_epi64(b, 32);
  __m256i ll = _mm256_mul_epu32(a, b);
  __m256i lh = _mm256_mul_epu32(a, b_hi);
  __m256i hl = _mm256_mul_epu32(a_hi, b);
  __m256i hh = _mm256_mul_epu32(a_hi, b_hi);
  __m256i mid = _mm256_add_epi64(_mm256_srli_epi64(ll, 32),
                                 _mm256_and_si256(lh, lo_mask));
  mid = _mm256_add_epi64(mid, _mm256_and_si256(hl, lo_mask));
  __m256i hi = _mm256_add_epi64(hh, _mm256_srli_epi64(lh, 32));
  hi = _mm256_add_epi64(hi, _mm256_srli_epi64(hl, 32));
  return _mm256_add_epi64(hi, _mm256_srli_epi64(mid, 32));
}

inline __m256i mullo_epu64(__m256i a, __m256i b) {
  __m256i a_hi = _mm256_srli_epi64(a, 32);
  __m256i b_hi = _mm256_srli_epi64(b, 32);
  __m256i ll = _mm256_mul_epu32(a, b);
  __m256i lh = _mm256_mul_epu32(a, b_hi);
  __m256i hl = _mm256_mul_epu32(a_hi, b);
  __m256i cross = _mm256_add_epi64(lh, hl);
  return _mm256_add_epi64(ll, _mm256_slli_epi64(cross, 32));
}

// a - q if a >= q, else a. Valid for values < 2^63 (signed compare is safe:
// our moduli are < 2^62 and lazy values stay < 4q < 2^64... callers only use
// this with operands < 2^63).
inline __m256i csub_epu64(__m256i a, __m256i q) {
  __m256i gt = _mm256_cmpgt_epi64(q, a);  // q > a ? -1 : 0
  __m256i sub = _mm256_andnot_si256(gt, q);
  return _mm256_sub_epi64(a, sub);
}

inline __m256i shoup_lazy(__m256i a, __m256i w, __m256i w_shoup, __m256i q) {
  __m256i hi = mulhi_epu64(a, w_shoup);
  return _mm256_sub_epi64(mullo_epu64(a, w), mullo_epu64(hi, q));
}

double dot_f64_avx2(const double* a, const double* b, size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4),
                           acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  __m256d acc = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double out = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) out += a[i] * b[i];
  return out;
}

void axpy_f64_avx2(double alpha, const double* x, double* y, size_t n) {
  __m256d va = _mm256_set1_pd(alpha);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void add_mod_avx2(uint64_t* r, const uint64_t* a, const uint64_t* b, size_t n,
                  uint64_t q) {
  const __m256i vq = _mm256_set1_epi64x(int64_t(q));
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    __m256i s = _mm256_add_epi64(va, vb);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(r + i), csub_epu64(s, vq));
  }
  for (; i < n; ++i) r[i] = add_mod1(a[i], b[i], q);
}

void sub_mod_avx2(uint64_t* r, const uint64_t* a, const uint64_t* b, size_t n,
                  uint64_t q) {
  const __m256i vq = _mm256_set1_epi64x(int64_t(q));
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    __m256i s = _mm256_sub_epi64(_mm256_add_epi64(va, vq), vb);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(r + i), csub_epu64(s, vq));
  }
  for (; i < n; ++i) r[i] = sub_mod1(a[i], b[i], q);
}

void mul_mod_shoup_avx2(uint64_t* r, const uint64_t* a, size_t n, uint64_t w,
                        uint64_t w_shoup, uint64_t q) {
  const __m256i vw = _mm256_set1_epi64x(int64_t(w));
  const __m256i vws = _mm256_set1_epi64x(int64_t(w_shoup));
  const __m256i vq = _mm256_set1_epi64x(int64_t(q));
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    __m256i t = shoup_lazy(va, vw, vws, vq);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(r + i), csub_epu64(t, vq));
  }
  for (; i < n; ++i) r[i] = mul_mod_shoup1(a[i], w, w_shoup, q);
}

void mac_mod_shoup_avx2(uint64_t* acc, const uint64_t* a, size_t n, uint64_t w,
                        uint64_t w_shoup, uint64_t q) {
  const __m256i vw = _mm256_set1_epi64x(int64_t(w));
  const __m256i vws = _mm256_set1_epi64x(int64_t(w_shoup));
  const __m256i vq = _mm256_set1_epi64x(int64_t(q));
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    __m256i vc = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(acc + i));
    __m256i t = csub_epu64(shoup_lazy(va, vw, vws, vq), vq);
    __m256i s = csub_epu64(_mm256_add_epi64(vc, t), vq);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(acc + i), s);
  }
  for (; i < n; ++i) {
    uint64_t t = mul_mod_shoup1(a[i], w, w_shoup, q);
    acc[i] = add_mod1(acc[i], t, q);
  }
}

void fwd_butterfly_avx2(uint64_t* x, uint64_t* y, size_t n, uint64_t w,
                        uint64_t w_shoup, uint64_t q, uint64_t two_q) {
  const __m256i vw = _mm256_set1_epi64x(int64_t(w));
  const __m256i vws = _mm256_set1_epi64x(int64_t(w_shoup));
  const __m256i vq = _mm256_set1_epi64x(int64_t(q));
  const __m256i v2q = _mm256_set1_epi64x(int64_t(two_q));
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i vx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + i));
    __m256i vy = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(y + i));
    vx = csub_epu64(vx, v2q);
    __m256i t = shoup_lazy(vy, vw, vws, vq);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(x + i),
                        _mm256_add_epi64(vx, t));
    _mm256_storeu_si256(
        reinterpret_cast<__m256i*>(y + i),
        _mm256_add_epi64(_mm256_sub_epi64(vx, t), v2q));
  }
  for (; i < n; ++i) {
    uint64_t u = x[i];
    if (u >= two_q) u -= two_q;
    uint64_t t = mul_mod_shoup_lazy1(y[i], w, w_shoup, q);
    x[i] = u + t;
    y[i] = u - t + two_q;
  }
}

void inv_butterfly_avx2(uint64_t* x, uint64_t* y, size_t n, uint64_t w,
                        uint64_t w_shoup, uint64_t q, uint64_t two_q) {
  const __m256i vw = _mm256_set1_epi64x(int64_t(w));
  const __m256i vws = _mm256_set1_epi64x(int64_t(w_shoup));
  const __m256i vq = _mm256_set1_epi64x(int64_t(q));
  const __m256i v2q = _mm256_set1_epi64x(int64_t(two_q));
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i vx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + i));
    __m256i vy = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(y + i));
    __m256i s = csub_epu64(_mm256_add_epi64(vx, vy), v2q);
    __m256i d = _mm256_add_epi64(_mm256_sub_epi64(vx, vy), v2q);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(x + i), s);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(y + i),
                        shoup_lazy(d, vw, vws, vq));
  }
  for (; i < n; ++i) {
    uint64_t u = x[i];
    uint64_t v = y[i];
    uint64_t s = u + v;
    if (s >= two_q) s -= two_q;
    x[i] = s;
    y[i] = mul_mod_shoup_lazy1(u - v + two_q, w, w_shoup, q);
  }
}

}  // namespace

const Funcs* avx2() {
  if (!__builtin_cpu_supports("avx2")) return nullptr;
  static const Funcs table = {
      "avx2",          dot_f64_avx2,       axpy_f64_avx2,
      add_mod_avx2,    sub_mod_avx2,       mul_mod_shoup_avx2,
      mac_mod_shoup_avx2, fwd_butterfly_avx2, inv_butterfly_avx2,
  };
  return &table;
}

}  // namespace hefuzz::kernels

#else  // !__x86_64__

namespace hefuzz::kernels {
const Funcs* avx2() { return nullptr; }
}  // namespace hefuzz::kernels

#endif
