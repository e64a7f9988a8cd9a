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

#include "hefuzz/ckks/plain_backend.hpp"

#include <cmath>

#include "hefuzz/common.hpp"

namespace hefuzz::ckks::plain {

PlainBackend::PlainBackend(const HeParams& params) : params_(params) {
  params_.validate();
  // Default to the nominal 2^bits prime sizes; callers wanting exact scale
  // agreement with an engine context override via set_prime_values.
  for (size_t i = 0; i + 1 < params_.modulus_bits.size(); ++i) {
    primes_.push_back(std::ldexp(1.0, params_.modulus_bits[i]));
  }
}

PlainCt PlainBackend::encrypt(std::span<const double> values) const {
  if (values.size() > slot_count()) throw TooManySlots("batch exceeds slots");
  PlainCt ct;
  ct.slots.assign(values.begin(), values.end());
  ct.slots.resize(slot_count(), 0.0);
  ct.level = top_level();
  ct.scale = params_.scale;
  return ct;
}

std::vector<double> PlainBackend::decrypt(const PlainCt& ct) const {
  return ct.slots;
}

PlainCt PlainBackend::add(const PlainCt& a, const PlainCt& b) const {
  if (a.level != b.level) throw LevelMismatch("add: level mismatch");
  if (a.scale != b.scale) throw ScaleMismatch("add: scale mismatch");
  PlainCt out = a;
  for (size_t i = 0; i < out.slots.size(); ++i) out.slots[i] += b.slots[i];
  return out;
}

PlainCt PlainBackend::add_plain(const PlainCt& ct, double value) const {
  PlainCt out = ct;
  for (double& v : out.slots) v += value;
  return out;
}

PlainCt PlainBackend::rescale(const PlainCt& ct) const {
  if (ct.level == 0) throw LevelExhausted("rescale at level 0");
  PlainCt out = ct;
  out.level = ct.level - 1;
  out.scale = ct.scale / primes_[ct.level];
  return out;
}

PlainCt PlainBackend::drop_to_level(const PlainCt& ct, uint32_t level) const {
  if (level > ct.level) throw LevelMismatch("cannot raise a ciphertext level");
  PlainCt out = ct;
  out.level = level;
  return out;
}

PlainCt PlainBackend::mul(const PlainCt& a, const PlainCt& b) const {
  if (a.level != b.level) throw LevelMismatch("mul: level mismatch");
  if (a.level == 0) throw LevelExhausted("mul at level 0");
  PlainCt out = a;
  for (size_t i = 0; i < out.slots.size(); ++i) out.slots[i] *= b.slots[i];
  out.scale = a.scale * b.scale;
  return rescale(out);
}

PlainCt PlainBackend::mul_plain(const PlainCt& ct, double value) const {
  if (ct.level == 0) throw LevelExhausted("mul_plain at level 0");
  PlainCt out = ct;
  for (double& v : out.slots) v *= value;
  out.scale = ct.scale * params_.scale;
  return rescale(out);
}

PlainCt PlainBackend::mul_plain_vec(const PlainCt& ct,
                                    std::span<const double> values) const {
  if (ct.level == 0) throw LevelExhausted("mul_plain at level 0");
  PlainCt out = ct;
  for (size_t i = 0; i < out.slots.size(); ++i) {
    out.slots[i] *= i < values.size() ? values[i] : 0.0;
  }
  out.scale = ct.scale * params_.scale;
  return rescale(out);
}

PlainCt PlainBackend::dot_ct_pt(std::span<const PlainCt> cts,
                                std::span<const double> plains) const {
  if (cts.size() != plains.size() || cts.empty()) {
    throw DimensionMismatch("dot_ct_pt: length mismatch");
  }
  if (cts[0].level == 0) throw LevelExhausted("dot_ct_pt at level 0");
  PlainCt acc;
  acc.level = cts[0].level;
  acc.scale = cts[0].scale * params_.scale;
  acc.slots.assign(slot_count(), 0.0);
  for (size_t i = 0; i < cts.size(); ++i) {
    if (cts[i].level != acc.level) throw LevelMismatch("dot: level mismatch");
    for (size_t s = 0; s < acc.slots.size(); ++s) {
      acc.slots[s] += cts[i].slots[s] * plains[i];
    }
  }
  return rescale(acc);
}

PlainCt PlainBackend::dot_ct_ct(std::span<const PlainCt> a,
                                std::span<const PlainCt> b) const {
  if (a.size() != b.size() || a.empty()) {
    throw DimensionMismatch("dot_ct_ct: length mismatch");
  }
  if (a[0].level == 0) throw LevelExhausted("dot_ct_ct at level 0");
  PlainCt acc;
  acc.level = a[0].level;
  acc.scale = a[0].scale * b[0].scale;
  acc.slots.assign(slot_count(), 0.0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].level != acc.level || b[i].level != acc.level) {
      throw LevelMismatch("dot: level mismatch");
    }
    for (size_t s = 0; s < acc.slots.size(); ++s) {
      acc.slots[s] += a[i].slots[s] * b[i].slots[s];
    }
  }
  return rescale(acc);
}

}  // namespace hefuzz::ckks::plain
