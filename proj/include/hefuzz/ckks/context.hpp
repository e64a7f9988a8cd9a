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

#include <complex>
#include <memory>
#include <vector>

#include "hefuzz/ckks/params.hpp"
#include "hefuzz/kernels.hpp"

namespace hefuzz::ckks {

// Per-prime negacyclic NTT tables (Longa-Naehrig layout: psi powers stored in
// bit-reversed order, Shoup companions alongside).
struct NttTables {
  uint64_t q = 0;
  uint64_t two_q = 0;
  kernels::BarrettRatio ratio;
  std::vector<uint64_t> psi_brev;
  std::vector<uint64_t> psi_brev_shoup;
  std::vector<uint64_t> psi_inv_brev;
  std::vector<uint64_t> psi_inv_brev_shoup;
  uint64_t n_inv = 0;
  uint64_t n_inv_shoup = 0;
};

// Precomputed CRT data for the first (level+1) chain primes.
struct CrtLevel {
  std::vector<uint64_t> modulus;              // Q_level, little-endian limbs
  std::vector<uint64_t> half;                 // floor(Q_level / 2)
  std::vector<std::vector<uint64_t>> hat;     // Q_level / q_i
  std::vector<uint64_t> hat_inv;              // [(Q/q_i)^-1]_{q_i}
  std::vector<uint64_t> hat_inv_shoup;
  double modulus_d = 0.0;
};

// Immutable precomputation shared by every object derived from one HeParams:
// the prime chain, NTT tables, CRT tables, rescale constants and the encoder
// FFT tables. Thread-safe by construction.
class Context {
 public:
  static std::shared_ptr<const Context> create(const HeParams& params);

  const HeParams& params() const { return params_; }
  size_t n() const { return n_; }
  size_t slots() const { return n_ / 2; }
  size_t chain_count() const { return chain_count_; }
  size_t top_level() const { return chain_count_ - 1; }

  // Prime index convention: [0, chain_count) are chain primes in drop order
  // (highest index dropped first); index chain_count is the special prime.
  uint64_t prime(size_t index) const { return primes_[index]; }
  uint64_t special_prime() const { return primes_[chain_count_]; }
  const NttTables& tables(size_t index) const { return tables_[index]; }
  double prime_d(size_t index) const { return double(primes_[index]); }

  const CrtLevel& crt(size_t level) const { return crt_[level]; }

  // [q_level^-1]_{q_i} and [q_level]_{q_i} for rescaling, i < level.
  uint64_t drop_inv(size_t level, size_t i) const {
    return drop_inv_[level][i];
  }
  uint64_t drop_inv_shoup(size_t level, size_t i) const {
    return drop_inv_shoup_[level][i];
  }
  uint64_t drop_mod(size_t level, size_t i) const { return drop_mod_[level][i]; }

  // [P^-1]_{q_i} and [P]_{q_i} for the key-switch mod-down.
  uint64_t special_inv(size_t i) const { return special_inv_[i]; }
  uint64_t special_inv_shoup(size_t i) const { return special_inv_shoup_[i]; }
  uint64_t special_mod(size_t i) const { return special_mod_[i]; }

  // Product of active chain primes at a level, as double.
  double level_modulus_d(size_t level) const { return crt_[level].modulus_d; }

  // In-place negacyclic NTT over one prime component.
  void ntt_forward(uint64_t* a, size_t prime_index) const;
  void ntt_inverse(uint64_t* a, size_t prime_index) const;

  // Encoder transforms (canonical embedding). Input/output length n.
  void embedding_forward(std::vector<std::complex<double>>& a) const;
  void embedding_inverse(std::vector<std::complex<double>>& a) const;
  std::complex<double> zeta(size_t t) const { return zeta_[t]; }

 private:
  explicit Context(const HeParams& params);

  void fft(std::vector<std::complex<double>>& a, bool inverse) const;

  HeParams params_;
  size_t n_ = 0;
  size_t chain_count_ = 0;
  std::vector<uint64_t> primes_;  // chain primes then special prime
  std::vector<NttTables> tables_;
  std::vector<CrtLevel> crt_;
  std::vector<std::vector<uint64_t>> drop_inv_;
  std::vector<std::vector<uint64_t>> drop_inv_shoup_;
  std::vector<std::vector<uint64_t>> drop_mod_;
  std::vector<uint64_t> special_inv_;
  std::vector<uint64_t> special_inv_shoup_;
  std::vector<uint64_t> special_mod_;

  std::vector<std::complex<double>> fft_roots_;  // e^{2*pi*i*k/n}, k < n/2
  std::vector<uint32_t> bit_rev_;
  std::vector<std::complex<double>> zeta_;  // e^{i*pi*t/n}, t < n
};

using ContextPtr = std::shared_ptr<const Context>;

}  // namespace hefuzz::ckks
