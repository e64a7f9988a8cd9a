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

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hefuzz/ckks/context.hpp"
#include "hefuzz/prng.hpp"

namespace hefuzz::ckks {

// RNS ring element. Component i holds the residues modulo chain prime i
// (key material additionally carries the special prime as its last
// component). Layout is [prime][coefficient].
struct RnsPoly {
  std::vector<uint64_t> data;
  uint32_t components = 0;
  bool ntt_form = true;

  uint64_t* comp(size_t i, size_t n) { return data.data() + i * n; }
  const uint64_t* comp(size_t i, size_t n) const { return data.data() + i * n; }
};

struct Plaintext {
  RnsPoly poly;  // over chain primes 0..level
  uint32_t level = 0;
  double scale = 1.0;
  // Canonical-embedding magnitude bound of the encoded message (scale
  // included); drives the worst-case noise bookkeeping.
  double can_norm = 0.0;
};

struct Ciphertext {
  RnsPoly c0, c1;
  uint32_t level = 0;
  double scale = 1.0;
  double value_bound = 0.0;  // nu: bound on the scaled message magnitude
  double noise_bound = 0.0;  // B: tracked canonical noise bound
  uint8_t slot_tag = 0;      // protocol-level slot layout annotation
};

struct SecretKey {
  RnsPoly s;  // chain + special components, NTT form
};

struct PublicKey {
  RnsPoly b, a;  // chain components, NTT form
};

// One key-switch digit per chain prime (hybrid keyswitching with a single
// special prime); components span chain + special.
struct RelinKey {
  std::vector<RnsPoly> b;
  std::vector<RnsPoly> a;
};

struct KeySet {
  SecretKey secret;
  PublicKey pub;
  RelinKey relin;
};

struct NoiseReport {
  double measured = 0.0;
  double bound = 0.0;
};

// ---- encoding -------------------------------------------------------------

// Canonical-embedding encode of up to n/2 reals at the given scale and level.
Plaintext encode(const Context& ctx, std::span<const double> values,
                 double scale, uint32_t level);
// Constant across all slots; exact (no FFT involved).
Plaintext encode_const(const Context& ctx, double value, double scale,
                       uint32_t level);
std::vector<double> decode(const Context& ctx, const Plaintext& pt);

// ---- keys / encryption -----------------------------------------------------

KeySet keygen(const Context& ctx, uint64_t seed);

// Encryption randomness is fresh by default; pass a Prng for reproducibility.
Ciphertext encrypt(const Context& ctx, const PublicKey& pk,
                   const Plaintext& pt, Prng* rng = nullptr);
Plaintext decrypt(const Context& ctx, const SecretKey& sk,
                  const Ciphertext& ct);
std::vector<double> decrypt_values(const Context& ctx, const SecretKey& sk,
                                   const Ciphertext& ct, size_t count);

// Total decrypt() invocations in this process; the responder-blindness test
// asserts the responder path never moves it.
uint64_t decrypt_invocations();

// ---- arithmetic -------------------------------------------------------------

// add/sub require equal level and identical scale; alignment is explicit.
Ciphertext add(const Context& ctx, const Ciphertext& a, const Ciphertext& b);
Ciphertext sub(const Context& ctx, const Ciphertext& a, const Ciphertext& b);
Ciphertext add_plain(const Context& ctx, const Ciphertext& ct,
                     const Plaintext& pt);
Ciphertext add_plain(const Context& ctx, const Ciphertext& ct, double value);

// Multiplications rescale immediately; level decreases by one.
Ciphertext mul(const Context& ctx, const Ciphertext& a, const Ciphertext& b,
               const RelinKey& rlk);
Ciphertext mul_plain(const Context& ctx, const Ciphertext& ct, double value);
Ciphertext mul_plain(const Context& ctx, const Ciphertext& ct,
                     const Plaintext& pt);

Ciphertext rescale(const Context& ctx, const Ciphertext& ct);
// Drop trailing chain primes without rescaling (level alignment for mul).
Ciphertext drop_to_level(const Context& ctx, const Ciphertext& ct,
                         uint32_t level);

// Coordinate-wise dot products per the protocol circuits. Products are
// accumulated at scale^2 and rescaled once, which lands at the same level and
// scale as per-term rescaling while keeping the noise under the per-term
// bound.
Ciphertext dot_ct_pt(const Context& ctx, std::span<const Ciphertext> cts,
                     std::span<const double> plains);
Ciphertext dot_ct_ct(const Context& ctx, std::span<const Ciphertext> a,
                     std::span<const Ciphertext> b, const RelinKey& rlk);

NoiseReport measure_noise(const Context& ctx, const SecretKey& sk,
                          const Ciphertext& ct,
                          std::span<const double> expected);

}  // namespace hefuzz::ckks
