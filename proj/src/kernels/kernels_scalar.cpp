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

namespace hefuzz::kernels {

namespace {

double dot_f64_scalar(const double* a, const double* b, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_f64_scalar(double alpha, const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void add_mod_scalar(uint64_t* r, const uint64_t* a, const uint64_t* b,
                    size_t n, uint64_t q) {
  for (size_t i = 0; i < n; ++i) r[i] = add_mod1(a[i], b[i], q);
}

void sub_mod_scalar(uint64_t* r, const uint64_t* a, const uint64_t* b,
                    size_t n, uint64_t q) {
  for (size_t i = 0; i < n; ++i) r[i] = sub_mod1(a[i], b[i], q);
}

void mul_mod_shoup_scalar(uint64_t* r, const uint64_t* a, size_t n, uint64_t w,
                          uint64_t w_shoup, uint64_t q) {
  for (size_t i = 0; i < n; ++i) r[i] = mul_mod_shoup1(a[i], w, w_shoup, q);
}

void mac_mod_shoup_scalar(uint64_t* acc, const uint64_t* a, size_t n,
                          uint64_t w, uint64_t w_shoup, uint64_t q) {
  for (size_t i = 0; i < n; ++i) {
    uint64_t t = mul_mod_shoup1(a[i], w, w_shoup, q);
    acc[i] = add_mod1(acc[i], t, q);
  }
}

void fwd_butterfly_scalar(uint64_t* x, uint64_t* y, size_t n, uint64_t w,
                          uint64_t w_shoup, uint64_t q, uint64_t two_q) {
  for (size_t i = 0; i < n; ++i) {
    uint64_t u = x[i];
    if (u >= two_q) u -= two_q;
    uint64_t t = mul_mod_shoup_lazy1(y[i], w, w_shoup, q);
    x[i] = u + t;
    y[i] = u - t + two_q;
  }
}

void inv_butterfly_scalar(uint64_t* x, uint64_t* y, size_t n, uint64_t w,
                          uint64_t w_shoup, uint64_t q, uint64_t two_q) {
  for (size_t i = 0; i < n; ++i) {
    uint64_t u = x[i];
    uint64_t v = y[i];
    uint64_t s = u + v;
    if (s >= two_q) s -= two_q;
    x[i] = s;
    y[i] = mul_mod_shoup_lazy1(u - v + two_q, w, w_shoup, q);
  }
}

}  // namespace

const Funcs& scalar() {
  static const Funcs table = {
      "scalar",          dot_f64_scalar,       axpy_f64_scalar,
      add_mod_scalar,    sub_mod_scalar,       mul_mod_shoup_scalar,
      mac_mod_shoup_scalar, fwd_butterfly_scalar, inv_butterfly_scalar,
  };
  return table;
}

BarrettRatio barrett_precompute(uint64_t q) {
  // floor(2^128 / q) done as long division of 2^128 by q.
  unsigned __int128 hi_part = (~static_cast<unsigned __int128>(0)) / q;
  // hi_part = floor((2^128 - 1) / q); exact for our use since q > 1 does not
  // divide 2^128 (q is odd prime).
  BarrettRatio r;
  r.hi = uint64_t(hi_part >> 64);
  r.lo = uint64_t(hi_part);
  return r;
}

uint64_t pow_mod(uint64_t base, uint64_t exp, uint64_t q) {
  unsigned __int128 acc = 1;
  unsigned __int128 b = base % q;
  while (exp != 0) {
    if (exp & 1) acc = acc * b % q;
    b = b * b % q;
    exp >>= 1;
  }
  return uint64_t(acc);
}

uint64_t inv_mod(uint64_t a, uint64_t q) { return pow_mod(a, q - 2, q); }

}  // namespace hefuzz::kernels
