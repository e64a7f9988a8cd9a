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

#include <cmath>
#include <cstdint>
#include <vector>

// Fixed-width little-endian limb arithmetic for exact CRT reconstruction.
// Moduli products stay under a dozen 64-bit limbs, so everything is simple
// schoolbook with no allocation in the hot paths.
namespace hefuzz::ckks::bigint {

using Limbs = std::vector<uint64_t>;

inline Limbs from_u64(uint64_t v, size_t width) {
  Limbs out(width, 0);
  if (width > 0) out[0] = v;
  return out;
}

// acc += a * b where acc has enough width to absorb the product.
inline void mul_u64_acc(Limbs& acc, const Limbs& a, uint64_t b) {
  uint64_t carry = 0;
  size_t i = 0;
  for (; i < a.size(); ++i) {
    unsigned __int128 cur = static_cast<unsigned __int128>(a[i]) * b +
                            acc[i] + carry;
    acc[i] = uint64_t(cur);
    carry = uint64_t(cur >> 64);
  }
  for (; carry != 0 && i < acc.size(); ++i) {
    unsigned __int128 cur = static_cast<unsigned __int128>(acc[i]) + carry;
    acc[i] = uint64_t(cur);
    carry = uint64_t(cur >> 64);
  }
}

inline Limbs mul_u64(const Limbs& a, uint64_t b) {
  Limbs out(a.size() + 1, 0);
  mul_u64_acc(out, a, b);
  return out;
}

// -1 / 0 / 1 comparison over equal-width views (shorter treated as zero-padded).
inline int cmp(const Limbs& a, const Limbs& b) {
  size_t w = std::max(a.size(), b.size());
  for (size_t i = w; i-- > 0;) {
    uint64_t av = i < a.size() ? a[i] : 0;
    uint64_t bv = i < b.size() ? b[i] : 0;
    if (av != bv) return av < bv ? -1 : 1;
  }
  return 0;
}

// a -= b, requires a >= b.
inline void sub_in_place(Limbs& a, const Limbs& b) {
  uint64_t borrow = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    uint64_t bv = i < b.size() ? b[i] : 0;
    unsigned __int128 cur = static_cast<unsigned __int128>(a[i]) - bv - borrow;
    a[i] = uint64_t(cur);
    borrow = uint64_t(cur >> 64) != 0 ? 1 : 0;
  }
}

// value mod m via limb-wise Horner.
inline uint64_t mod_u64(const Limbs& a, uint64_t m) {
  unsigned __int128 acc = 0;
  for (size_t i = a.size(); i-- > 0;) {
    acc = ((acc << 64) | a[i]) % m;
  }
  return uint64_t(acc);
}

inline double to_double(const Limbs& a) {
  long double acc = 0.0L;
  for (size_t i = a.size(); i-- > 0;) {
    acc = acc * 18446744073709551616.0L + static_cast<long double>(a[i]);
  }
  return double(acc);
}

inline bool is_zero(const Limbs& a) {
  for (uint64_t v : a) {
    if (v != 0) return false;
  }
  return true;
}

}  // namespace hefuzz::ckks::bigint
