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

#include "hefuzz/ckks/context.hpp"

#include <algorithm>
#include <cmath>

#include "bigint.hpp"
#include "hefuzz/common.hpp"

namespace hefuzz::ckks {

namespace {

bool miller_rabin(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                     23ull, 29ull, 31ull, 37ull}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                     23ull, 29ull, 31ull, 37ull}) {
    uint64_t x = kernels::pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 0; i < r - 1; ++i) {
      x = uint64_t((static_cast<unsigned __int128>(x) * x) % n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// Largest prime <= 2^bits with p = 1 (mod 2n), distinct from `taken`.
uint64_t find_ntt_prime(int bits, size_t n, std::vector<uint64_t>& taken) {
  if (bits < 20 || bits > 61) throw InvalidParams("modulus bits out of range");
  uint64_t step = uint64_t(2) * n;
  uint64_t top = (uint64_t(1) << bits) - 1;
  uint64_t cand = top - (top % step) + 1;  // largest value <= 2^bits, = 1 mod 2n
  while (cand > (uint64_t(1) << (bits - 1))) {
    if (cand <= (uint64_t(1) << bits) && miller_rabin(cand) &&
        std::find(taken.begin(), taken.end(), cand) == taken.end()) {
      taken.push_back(cand);
      return cand;
    }
    cand -= step;
  }
  throw InvalidParams("no NTT prime found for requested size");
}

uint32_t reverse_bits(uint32_t v, int bits) {
  uint32_t out = 0;
  for (int i = 0; i < bits; ++i) {
    out = (out << 1) | ((v >> i) & 1);
  }
  return out;
}

// Primitive 2n-th root of unity mod q: draw x, set psi = x^((q-1)/2n), accept
// when psi^n = -1 (orders in a power-of-two group leave no other option).
uint64_t find_primitive_root(uint64_t q, size_t n) {
  uint64_t exp = (q - 1) / (uint64_t(2) * n);
  for (uint64_t x = 2;; ++x) {
    uint64_t psi = kernels::pow_mod(x, exp, q);
    if (psi != 0 && kernels::pow_mod(psi, n, q) == q - 1) return psi;
  }
}

NttTables build_tables(uint64_t q, size_t n) {
  NttTables t;
  t.q = q;
  t.two_q = 2 * q;
  t.ratio = kernels::barrett_precompute(q);
  uint64_t psi = find_primitive_root(q, n);
  uint64_t psi_inv = kernels::inv_mod(psi, q);
  int logn = 0;
  while ((size_t(1) << logn) < n) ++logn;
  t.psi_brev.resize(n);
  t.psi_brev_shoup.resize(n);
  t.psi_inv_brev.resize(n);
  t.psi_inv_brev_shoup.resize(n);
  uint64_t pow = 1;
  uint64_t pow_inv = 1;
  std::vector<uint64_t> fwd(n), inv(n);
  for (size_t i = 0; i < n; ++i) {
    fwd[i] = pow;
    inv[i] = pow_inv;
    pow = uint64_t((static_cast<unsigned __int128>(pow) * psi) % q);
    pow_inv = uint64_t((static_cast<unsigned __int128>(pow_inv) * psi_inv) % q);
  }
  for (size_t i = 0; i < n; ++i) {
    uint32_t r = reverse_bits(uint32_t(i), logn);
    t.psi_brev[i] = fwd[r];
    t.psi_inv_brev[i] = inv[r];
    t.psi_brev_shoup[i] = kernels::shoup_precompute(fwd[r], q);
    t.psi_inv_brev_shoup[i] = kernels::shoup_precompute(inv[r], q);
  }
  t.n_inv = kernels::inv_mod(uint64_t(n), q);
  t.n_inv_shoup = kernels::shoup_precompute(t.n_inv, q);
  return t;
}

}  // namespace

void HeParams::validate() const {
  if (ring_degree < 8 || (ring_degree & (ring_degree - 1)) != 0) {
    throw InvalidParams("ring_degree must be a power of two >= 8");
  }
  if (modulus_bits.size() < 3) {
    throw InvalidParams("modulus chain needs at least 3 primes");
  }
  for (int b : modulus_bits) {
    if (b < 20 || b > 60) throw InvalidParams("modulus bits must be in [20,60]");
  }
  if (special_bits() < *std::max_element(modulus_bits.begin(),
                                         modulus_bits.end() - 1)) {
    throw InvalidParams("special prime must not be smaller than chain primes");
  }
  if (scale < 2.0) throw InvalidParams("scale must exceed 2");
  if (error_stddev <= 0.0) throw InvalidParams("error stddev must be positive");
  if (secret_hamming_weight < 1 || secret_hamming_weight > ring_degree) {
    throw InvalidParams("secret hamming weight out of range");
  }
}

int HeParams::security_bits() const {
  // homomorphicencryption.org standard table, ternary secret, classical.
  struct Row {
    uint32_t n;
    int logq128, logq192, logq256;
  };
  static constexpr Row kTable[] = {
      {1024, 27, 19, 14},   {2048, 54, 37, 29},    {4096, 109, 75, 58},
      {8192, 218, 152, 118}, {16384, 438, 305, 237}, {32768, 881, 611, 476},
  };
  int total = special_bits();
  for (size_t i = 0; i + 1 < modulus_bits.size(); ++i) total += modulus_bits[i];
  for (const Row& row : kTable) {
    if (row.n == ring_degree) {
      if (total <= row.logq256) return 256;
      if (total <= row.logq192) return 192;
      if (total <= row.logq128) return 128;
      return 0;
    }
  }
  return 0;
}

std::string HeParams::canonical_text() const {
  std::string s;
  s += "error_stddev=" + std::to_string(error_stddev) + "\n";
  s += "modulus_bits=";
  for (size_t i = 0; i < modulus_bits.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(modulus_bits[i]);
  }
  s += "\n";
  s += "ring_degree=" + std::to_string(ring_degree) + "\n";
  s += "scale=" + std::to_string(scale) + "\n";
  s += "secret_hamming_weight=" + std::to_string(secret_hamming_weight) + "\n";
  s += "special_modulus_bits=" + std::to_string(special_modulus_bits) + "\n";
  return s;
}

double noise_clean(const HeParams& p) {
  double n = double(p.ring_degree);
  double sigma = p.error_stddev;
  double h = double(p.secret_hamming_weight);
  return 8.0 * std::sqrt(2.0) * sigma * n + 6.0 * sigma * std::sqrt(n) +
         16.0 * sigma * std::sqrt(h * n);
}

double noise_scale(const HeParams& p) {
  double n = double(p.ring_degree);
  double h = double(p.secret_hamming_weight);
  return std::sqrt(n / 3.0) * (3.0 + 8.0 * std::sqrt(h));
}

double noise_ks(const HeParams& p) {
  double n = double(p.ring_degree);
  return 8.0 * p.error_stddev * n / std::sqrt(3.0);
}

double noise_mult(const HeParams& p, double q_level_over_special) {
  return q_level_over_special * noise_ks(p) + noise_scale(p);
}

Context::Context(const HeParams& params) : params_(params) {
  params_.validate();
  n_ = params_.ring_degree;
  chain_count_ = params_.chain_size();

  std::vector<uint64_t> taken;
  for (size_t i = 0; i < chain_count_; ++i) {
    primes_.push_back(find_ntt_prime(params_.modulus_bits[i], n_, taken));
  }
  primes_.push_back(find_ntt_prime(params_.special_bits(), n_, taken));

  tables_.reserve(primes_.size());
  for (uint64_t q : primes_) tables_.push_back(build_tables(q, n_));

  // CRT tables per level over chain primes 0..level.
  for (size_t level = 0; level < chain_count_; ++level) {
    CrtLevel c;
    size_t count = level + 1;
    size_t width = count + 1;
    c.modulus = bigint::from_u64(1, width);
    for (size_t i = 0; i < count; ++i) {
      c.modulus = bigint::mul_u64(c.modulus, primes_[i]);
      c.modulus.resize(width);
    }
    c.half = c.modulus;
    uint64_t carry = 0;
    for (size_t i = c.half.size(); i-- > 0;) {
      uint64_t cur = c.half[i];
      c.half[i] = (cur >> 1) | (carry << 63);
      carry = cur & 1;
    }
    for (size_t i = 0; i < count; ++i) {
      // hat_i = Q / q_i
      bigint::Limbs hat = bigint::from_u64(1, width);
      for (size_t j = 0; j < count; ++j) {
        if (j == i) continue;
        hat = bigint::mul_u64(hat, primes_[j]);
        hat.resize(width);
      }
      uint64_t hat_mod = bigint::mod_u64(hat, primes_[i]);
      c.hat.push_back(std::move(hat));
      c.hat_inv.push_back(kernels::inv_mod(hat_mod, primes_[i]));
      c.hat_inv_shoup.push_back(
          kernels::shoup_precompute(c.hat_inv.back(), primes_[i]));
    }
    c.modulus_d = bigint::to_double(c.modulus);
    crt_.push_back(std::move(c));
  }

  drop_inv_.resize(chain_count_);
  drop_inv_shoup_.resize(chain_count_);
  drop_mod_.resize(chain_count_);
  for (size_t level = 1; level < chain_count_; ++level) {
    uint64_t q_drop = primes_[level];
    for (size_t i = 0; i < level; ++i) {
      uint64_t inv = kernels::inv_mod(q_drop % primes_[i], primes_[i]);
      drop_inv_[level].push_back(inv);
      drop_inv_shoup_[level].push_back(kernels::shoup_precompute(inv, primes_[i]));
      drop_mod_[level].push_back(q_drop % primes_[i]);
    }
  }
  uint64_t sp = special_prime();
  for (size_t i = 0; i < chain_count_; ++i) {
    uint64_t inv = kernels::inv_mod(sp % primes_[i], primes_[i]);
    special_inv_.push_back(inv);
    special_inv_shoup_.push_back(kernels::shoup_precompute(inv, primes_[i]));
    special_mod_.push_back(sp % primes_[i]);
  }

  // Encoder tables.
  int logn = 0;
  while ((size_t(1) << logn) < n_) ++logn;
  fft_roots_.resize(n_ / 2);
  for (size_t k = 0; k < n_ / 2; ++k) {
    double ang = 2.0 * M_PI * double(k) / double(n_);
    fft_roots_[k] = {std::cos(ang), std::sin(ang)};
  }
  bit_rev_.resize(n_);
  for (size_t i = 0; i < n_; ++i) bit_rev_[i] = reverse_bits(uint32_t(i), logn);
  zeta_.resize(n_);
  for (size_t t = 0; t < n_; ++t) {
    double ang = M_PI * double(t) / double(n_);
    zeta_[t] = {std::cos(ang), std::sin(ang)};
  }
}

ContextPtr Context::create(const HeParams& params) {
  return std::shared_ptr<const Context>(new Context(params));
}

void Context::ntt_forward(uint64_t* a, size_t prime_index) const {
  const NttTables& tb = tables_[prime_index];
  const auto& k = kernels::active();
  size_t t = n_;
  for (size_t m = 1; m < n_; m <<= 1) {
    t >>= 1;
    for (size_t i = 0; i < m; ++i) {
      uint64_t w = tb.psi_brev[m + i];
      uint64_t ws = tb.psi_brev_shoup[m + i];
      uint64_t* x = a + 2 * i * t;
      k.fwd_butterfly(x, x + t, t, w, ws, tb.q, tb.two_q);
    }
  }
  // Values are < 4q after the lazy passes; fold to [0, q).
  for (size_t i = 0; i < n_; ++i) {
    uint64_t v = a[i];
    if (v >= tb.two_q) v -= tb.two_q;
    if (v >= tb.q) v -= tb.q;
    a[i] = v;
  }
}

void Context::ntt_inverse(uint64_t* a, size_t prime_index) const {
  const NttTables& tb = tables_[prime_index];
  const auto& k = kernels::active();
  size_t t = 1;
  for (size_t m = n_; m > 1; m >>= 1) {
    size_t h = m >> 1;
    size_t j1 = 0;
    for (size_t i = 0; i < h; ++i) {
      uint64_t w = tb.psi_inv_brev[h + i];
      uint64_t ws = tb.psi_inv_brev_shoup[h + i];
      uint64_t* x = a + j1;
      k.inv_butterfly(x, x + t, t, w, ws, tb.q, tb.two_q);
      j1 += 2 * t;
    }
    t <<= 1;
  }
  k.mul_mod_shoup(a, a, n_, tb.n_inv, tb.n_inv_shoup, tb.q);
}

void Context::fft(std::vector<std::complex<double>>& a, bool inverse) const {
  const size_t n = a.size();
  for (size_t i = 0; i < n; ++i) {
    uint32_t j = bit_rev_[i];
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    size_t stride = n / len;
    for (size_t start = 0; start < n; start += len) {
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> w = fft_roots_[k * stride];
        if (inverse) w = std::conj(w);
        std::complex<double> u = a[start + k];
        std::complex<double> v = a[start + k + len / 2] * w;
        a[start + k] = u + v;
        a[start + k + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    double inv_n = 1.0 / double(n);
    for (auto& v : a) v *= inv_n;
  }
}

void Context::embedding_forward(std::vector<std::complex<double>>& a) const {
  fft(a, false);
}

void Context::embedding_inverse(std::vector<std::complex<double>>& a) const {
  fft(a, true);
}

}  // namespace hefuzz::ckks
