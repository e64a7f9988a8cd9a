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

#include <span>
#include <vector>

#include "hefuzz/ckks/context.hpp"

namespace hefuzz::ckks::plain {

// Oracle backend mirroring the engine interface over exact slot arithmetic.
// Same level/scale discipline and the same errors, but values are kept in the
// clear; differential tests drive both backends with identical inputs.
struct PlainCt {
  std::vector<double> slots;
  uint32_t level = 0;
  double scale = 1.0;
};

class PlainBackend {
 public:
  explicit PlainBackend(const HeParams& params);

  size_t slot_count() const { return params_.ring_degree / 2; }
  uint32_t top_level() const { return uint32_t(params_.chain_size() - 1); }

  PlainCt encrypt(std::span<const double> values) const;
  std::vector<double> decrypt(const PlainCt& ct) const;

  PlainCt add(const PlainCt& a, const PlainCt& b) const;
  PlainCt add_plain(const PlainCt& ct, double value) const;
  PlainCt mul(const PlainCt& a, const PlainCt& b) const;
  PlainCt mul_plain(const PlainCt& ct, double value) const;
  PlainCt mul_plain_vec(const PlainCt& ct, std::span<const double> values) const;
  PlainCt rescale(const PlainCt& ct) const;
  PlainCt drop_to_level(const PlainCt& ct, uint32_t level) const;
  PlainCt dot_ct_pt(std::span<const PlainCt> cts,
                    std::span<const double> plains) const;
  PlainCt dot_ct_ct(std::span<const PlainCt> a,
                    std::span<const PlainCt> b) const;

  // The rescale divisors mirror the engine's actual prime values, so scales
  // track the HE backend exactly.
  void set_prime_values(std::vector<double> primes) { primes_ = std::move(primes); }

 private:
  HeParams params_;
  std::vector<double> primes_;
};

}  // namespace hefuzz::ckks::plain
