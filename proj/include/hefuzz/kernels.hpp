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

#include <cstddef>
#include <cstdint>
#include <string>

// Data-parallel inner loops used by the ring arithmetic and the float
// pipelines. Every kernel has a scalar reference implementation and may have
// an AVX2 variant; the active table is picked once at startup (cpuid, or the
// HEFUZZ_KERNELS env var to force a backend). Scalar and SIMD variants are
// equivalence-tested against each other.
//
// Modular kernels assume q < 2^61 so that lazy values < 4q stay clear of the
// sign bit (the AVX2 variants compare via signed 64-bit lanes). "shoup"
// variants take a precomputed companion word w_shoup = floor(w * 2^64 / q)
// for the fixed multiplier w.
namespace hefuzz::kernels {

struct Funcs {
  const char* name;

  // f64
  double (*dot_f64)(const double* a, const double* b, size_t n);
  void (*axpy_f64)(double alpha, const double* x, double* y, size_t n);

  // u64 mod q, elementwise, all inputs/outputs fully reduced (< q)
  void (*add_mod)(uint64_t* r, const uint64_t* a, const uint64_t* b, size_t n,
                  uint64_t q);
  void (*sub_mod)(uint64_t* r, const uint64_t* a, const uint64_t* b, size_t n,
                  uint64_t q);
  void (*mul_mod_shoup)(uint64_t* r, const uint64_t* a, size_t n, uint64_t w,
                        uint64_t w_shoup, uint64_t q);
  // acc[i] = (acc[i] + a[i] * w) mod q
  void (*mac_mod_shoup)(uint64_t* acc, const uint64_t* a, size_t n, uint64_t w,
                        uint64_t w_shoup, uint64_t q);

  // Harvey lazy NTT butterflies over contiguous halves x[0..n), y[0..n).
  // Forward keeps values < 4q, inverse keeps values < 2q.
  void (*fwd_butterfly)(uint64_t* x, uint64_t* y, size_t n, uint64_t w,
                        uint64_t w_shoup, uint64_t q, uint64_t two_q);
  void (*inv_butterfly)(uint64_t* x, uint64_t* y, size_t n, uint64_t w,
                        uint64_t w_shoup, uint64_t q, uint64_t two_q);
};

const Funcs& scalar();
const Funcs* avx2();  // nullptr when unsupported by CPU or build
const Funcs& active();
// Force a backend by name ("scalar" / "avx2"); throws on unknown/unavailable.
void force_backend(const std::string& name);
std::string active_name();

// ---- scalar helpers shared by all backends -------------------------------

inline uint64_t shoup_precompute(uint64_t w, uint64_t q) {
  return uint64_t((static_cast<unsigned __int128>(w) << 64) / q);
}

// w*a mod q with precomputed shoup word; result fully reduced.
inline uint64_t mul_mod_shoup1(uint64_t a, uint64_t w, uint64_t w_shoup,
                               uint64_t q) {
  uint64_t hi = uint64_t((static_cast<unsigned __int128>(w_shoup) * a) >> 64);
  uint64_t r = w * a - hi * q;
  return r >= q ? r - q : r;
}

// Lazy variant, result < 2q.
inline uint64_t mul_mod_shoup_lazy1(uint64_t a, uint64_t w, uint64_t w_shoup,
                                    uint64_t q) {
  uint64_t hi = uint64_t((static_cast<unsigned __int128>(w_shoup) * a) >> 64);
  return w * a - hi * q;
}

// Barrett ratio floor(2^128 / q), two words.
struct BarrettRatio {
  uint64_t hi = 0;
  uint64_t lo = 0;
};

BarrettRatio barrett_precompute(uint64_t q);

// a*b mod q for arbitrary operands via 128-bit Barrett reduction.
inline uint64_t mul_mod_barrett1(uint64_t a, uint64_t b, uint64_t q,
                                 const BarrettRatio& ratio) {
  unsigned __int128 prod = static_cast<unsigned __int128>(a) * b;
  uint64_t x0 = uint64_t(prod);
  uint64_t x1 = uint64_t(prod >> 64);
  // quotient ~= floor(x * ratio / 2^128)
  uint64_t carry = uint64_t((static_cast<unsigned __int128>(x0) * ratio.lo) >> 64);
  unsigned __int128 m = static_cast<unsigned __int128>(x0) * ratio.hi + carry;
  m += static_cast<unsigned __int128>(x1) * ratio.lo;
  uint64_t quot = x1 * ratio.hi + uint64_t(m >> 64);
  uint64_t r = x0 - quot * q;
  return r >= q ? r - q : r;
}

inline uint64_t add_mod1(uint64_t a, uint64_t b, uint64_t q) {
  uint64_t s = a + b;
  return s >= q ? s - q : s;
}

inline uint64_t sub_mod1(uint64_t a, uint64_t b, uint64_t q) {
  return a >= b ? a - b : a + q - b;
}

uint64_t pow_mod(uint64_t base, uint64_t exp, uint64_t q);
uint64_t inv_mod(uint64_t a, uint64_t q);  // q prime

}  // namespace hefuzz::kernels
