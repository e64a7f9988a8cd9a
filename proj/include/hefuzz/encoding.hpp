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
#include <string_view>
#include <vector>

namespace hefuzz::encoding {

// Signature lengths used by the matching pipeline: the long encoding drives
// clustering / centroid selection, the short one the per-record match.
inline constexpr uint32_t kCentroidLength = 200;
inline constexpr uint32_t kMatchLength = 50;

struct EncodingParams {
  uint32_t shingle_size = 3;
  uint32_t num_permutations = kMatchLength;
  uint32_t max_hash = 1u << 20;
  uint64_t seed = 0;

  void validate() const;
  // Canonical key=value block (sorted keys, decimal integers). Its SHA-256
  // prefix is the fingerprint that ties signatures to their parameters.
  std::string canonical_text() const;
  uint32_t fingerprint() const;
};

struct MinHashSignature {
  std::vector<uint32_t> values;
  uint32_t params_fingerprint = 0;
};

struct ScalerParams {
  std::vector<double> means;
  std::vector<double> stds;  // floored at 1e-9
};

// Trim ASCII whitespace at both ends and lowercase ASCII letters. Interior
// spaces are preserved; shingling runs on the result.
std::string preprocess_name(std::string_view name);

// All length-S windows of `name`, deduplicated, sorted. The input is used
// verbatim (no case/whitespace normalization here). Throws NameTooShort.
std::vector<std::string> generate_shingles(std::string_view name,
                                           const EncodingParams& params);

// Universal hash family over a fixed 61-bit Mersenne prime. Index i selects
// an independent (a_i, b_i) pair drawn from a PRNG seeded by params.seed, so
// two parties with equal params own the same family.
class MinHasher {
 public:
  explicit MinHasher(const EncodingParams& params, uint32_t num_functions);

  // min over shingles of H_i(sha256_64(shingle)) for i in [first, first+count)
  std::vector<uint32_t> sign(const std::vector<std::string>& shingles,
                             uint32_t first, uint32_t count) const;

  const EncodingParams& params() const { return params_; }

 private:
  EncodingParams params_;
  std::vector<uint64_t> mult_;
  std::vector<uint64_t> add_;
};

// Signature over H_0 .. H_{P-1} of the preprocessed name.
MinHashSignature minhash_signature(std::string_view name,
                                   const EncodingParams& params);

struct DualSignature {
  MinHashSignature el200;  // H_0..H_199
  MinHashSignature el50;   // H_200..H_249
};

// Both protocol signatures from one shingle pass, disjoint hash indices.
DualSignature dual_signature(std::string_view name, const EncodingParams& base);

class DualEncoder {
 public:
  explicit DualEncoder(const EncodingParams& base);
  DualSignature encode(std::string_view name) const;

 private:
  EncodingParams el200_params_;
  EncodingParams el50_params_;
  MinHasher hasher_;
};

// sig / ||sig||_2. Throws ZeroVector on the all-zero input.
std::vector<double> normalize(const MinHashSignature& sig);
std::vector<double> normalize(const std::vector<double>& values);

// Per-coordinate mean and population std over normalized signatures.
ScalerParams fit_scaler(const std::vector<std::vector<double>>& dataset);

// (x - mean) / std, not re-normalized afterwards.
std::vector<double> standardize(const std::vector<double>& sig,
                                const ScalerParams& scaler);

// Cosine of two raw vectors (not assumed unit norm).
double cosine(const std::vector<double>& a, const std::vector<double>& b);

// MHSG signature file: 16-byte header {magic "MHSG", version u16, P u16,
// max_hash u32, fingerprint u32}, then little-endian u32 values per record.
void write_signature_file(const std::string& path,
                          const std::vector<MinHashSignature>& sigs,
                          const EncodingParams& params);
std::vector<MinHashSignature> read_signature_file(const std::string& path,
                                                  EncodingParams* params_out);

}  // namespace hefuzz::encoding
