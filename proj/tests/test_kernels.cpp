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
#include <vector>

#include "doctest.h"
#include "hefuzz/common.hpp"
#include "hefuzz/kernels.hpp"
#include "hefuzz/prng.hpp"

using namespace hefuzz;

namespace {

// A 60-bit NTT-friendly style prime and a smaller one.
constexpr uint64_t kQ60 = 1152921504606830593ULL;  // < 2^60, odd prime-ish size
constexpr uint64_t kQ40 = 1099511590913ULL;

std::vector<uint64_t> random_vec(size_t n, uint64_t bound, Prng& rng) {
  std::vector<uint64_t> v(n);
  for (auto& x : v) x = rng.next_below(bound);
  return v;
}

}  // namespace

TEST_CASE("scalar mulmod matches int128 reference") {
  Prng rng(1);
  for (uint64_t q : {kQ40, kQ60}) {
    auto ratio = kernels::barrett_precompute(q);
    for (int i = 0; i < 2000; ++i) {
      uint64_t a = rng.next_below(q);
      uint64_t b = rng.next_below(q);
      uint64_t want = uint64_t((unsigned __int128)a * b % q);
      CHECK(kernels::mul_mod_barrett1(a, b, q, ratio) == want);
      uint64_t ws = kernels::shoup_precompute(b, q);
      CHECK(kernels::mul_mod_shoup1(a, b, ws, q) == want);
      uint64_t lazy = kernels::mul_mod_shoup_lazy1(a, b, ws, q);
      CHECK((lazy == want || lazy == want + q));
    }
  }
}

TEST_CASE("simd variants agree with scalar reference") {
  const auto* simd = kernels::avx2();
  if (simd == nullptr) {
    MESSAGE("avx2 unavailable on this host; skipping equivalence");
    return;
  }
  const auto& ref = kernels::scalar();
  Prng rng(2);
  const uint64_t q = kQ60;

  for (size_t n : {size_t(1), size_t(3), size_t(64), size_t(1021)}) {
    auto a = random_vec(n, q, rng);
    auto b = random_vec(n, q, rng);
    std::vector<uint64_t> r1(n), r2(n);

    ref.add_mod(r1.data(), a.data(), b.data(), n, q);
    simd->add_mod(r2.data(), a.data(), b.data(), n, q);
    CHECK(r1 == r2);

    ref.sub_mod(r1.data(), a.data(), b.data(), n, q);
    simd->sub_mod(r2.data(), a.data(), b.data(), n, q);
    CHECK(r1 == r2);

    uint64_t w = rng.next_below(q);
    uint64_t ws = kernels::shoup_precompute(w, q);
    ref.mul_mod_shoup(r1.data(), a.data(), n, w, ws, q);
    simd->mul_mod_shoup(r2.data(), a.data(), n, w, ws, q);
    CHECK(r1 == r2);

    auto acc1 = b;
    auto acc2 = b;
    ref.mac_mod_shoup(acc1.data(), a.data(), n, w, ws, q);
    simd->mac_mod_shoup(acc2.data(), a.data(), n, w, ws, q);
    CHECK(acc1 == acc2);

    // lazy butterflies: compare after full reduction
    auto x1 = a, y1 = b, x2 = a, y2 = b;
    ref.fwd_butterfly(x1.data(), y1.data(), n, w, ws, q, 2 * q);
    simd->fwd_butterfly(x2.data(), y2.data(), n, w, ws, q, 2 * q);
    for (size_t i = 0; i < n; ++i) {
      CHECK(x1[i] % q == x2[i] % q);
      CHECK(y1[i] % q == y2[i] % q);
    }
    x1 = a, y1 = b, x2 = a, y2 = b;
    ref.inv_butterfly(x1.data(), y1.data(), n, w, ws, q, 2 * q);
    simd->inv_butterfly(x2.data(), y2.data(), n, w, ws, q, 2 * q);
    for (size_t i = 0; i < n; ++i) {
      CHECK(x1[i] % q == x2[i] % q);
      CHECK(y1[i] % q == y2[i] % q);
    }
  }
}

TEST_CASE("f64 kernels agree within fp tolerance") {
  const auto* simd = kernels::avx2();
  if (simd == nullptr) return;
  const auto& ref = kernels::scalar();
  Prng rng(3);
  for (size_t n : {size_t(1), size_t(7), size_t(200), size_t(4096)}) {
    std::vector<double> a(n), b(n);
    for (auto& v : a) v = rng.next_in(-1.0, 1.0);
    for (auto& v : b) v = rng.next_in(-1.0, 1.0);
    double d1 = ref.dot_f64(a.data(), b.data(), n);
    double d2 = simd->dot_f64(a.data(), b.data(), n);
    CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));

    auto y1 = b, y2 = b;
    ref.axpy_f64(0.37, a.data(), y1.data(), n);
    simd->axpy_f64(0.37, a.data(), y2.data(), n);
    for (size_t i = 0; i < n; ++i) {
      CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("pow_mod and inv_mod") {
  CHECK(kernels::pow_mod(2, 10, 1000003) == 1024);
  uint64_t q = 1000003;  // prime
  for (uint64_t a : {2ull, 3ull, 999999ull}) {
    uint64_t inv = kernels::inv_mod(a, q);
    CHECK(uint64_t((unsigned __int128)a * inv % q) == 1);
  }
}

TEST_CASE("backend selection") {
  CHECK((kernels::active_name() == "scalar" || kernels::active_name() == "avx2"));
  kernels::force_backend("scalar");
  CHECK(kernels::active_name() == "scalar");
  if (kernels::avx2() != nullptr) {
    kernels::force_backend("avx2");
    CHECK(kernels::active_name() == "avx2");
  }
  CHECK_THROWS_AS(kernels::force_backend("sse9"), ConfigError);
}
