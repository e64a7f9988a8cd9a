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
#include <string>
#include <vector>

namespace hefuzz::ckks {

// Leveled CKKS parameters. modulus_bits follows the usual SEAL/TenSEAL
// notation: the last entry is the key-switching (special) prime, the rest is
// the ciphertext chain. A fresh ciphertext sits at level chain_size()-1 and
// each rescale drops the highest active chain prime.
struct HeParams {
  uint32_t ring_degree = 8192;
  double scale = 1099511627776.0;  // 2^40
  std::vector<int> modulus_bits = {60, 40, 40, 60};
  double error_stddev = 3.2;
  uint32_t secret_hamming_weight = 64;
  // Overrides the size of the special prime when nonzero.
  int special_modulus_bits = 0;

  size_t chain_size() const { return modulus_bits.size() - 1; }
  size_t slot_count() const { return ring_degree / 2; }
  int special_bits() const {
    return special_modulus_bits != 0 ? special_modulus_bits
                                     : modulus_bits.back();
  }

  void validate() const;  // throws InvalidParams

  // Claimed security by homomorphicencryption.org table lookup (ternary
  // secret, classical). Returns 0 when the total modulus exceeds the table
  // budget for this ring degree. Never computed from an attack estimator.
  int security_bits() const;

  std::string canonical_text() const;

  bool operator==(const HeParams&) const = default;
};

// Worst-case noise bound helpers (canonical embedding norm).
double noise_clean(const HeParams& p);                 // fresh encryption
double noise_scale(const HeParams& p);                 // one rescale
double noise_ks(const HeParams& p);                    // key-switch unit
// P^{-1} * Q_level * B_ks + B_scale, with Q_level the full active modulus.
double noise_mult(const HeParams& p, double q_level_over_special);

}  // namespace hefuzz::ckks
