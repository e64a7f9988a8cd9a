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

#include "hefuzz/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "hefuzz/common.hpp"
#include "hefuzz/kernels.hpp"
#include "hefuzz/prng.hpp"
#include "hefuzz/sha256.hpp"

namespace hefuzz::encoding {

namespace {

// 2^61 - 1, the fixed Mersenne prime backing the universal hash family.
constexpr uint64_t kMersenne61 = (uint64_t(1) << 61) - 1;

uint64_t reduce_m61(unsigned __int128 v) {
  uint64_t lo = uint64_t(v) & kMersenne61;
  uint64_t hi = uint64_t(v >> 61);
  uint64_t r = lo + hi;
  if (r >= kMersenne61) r -= kMersenne61;
  return r;
}

}  // namespace

void EncodingParams::validate() const {
  if (shingle_size < 1) throw InvalidParams("shingle_size must be >= 1");
  if (num_permutations < 1) throw InvalidParams("num_permutations must be >= 1");
  if (max_hash < 2) throw InvalidParams("max_hash must be >= 2");
}

std::string EncodingParams::canonical_text() const {
  std::string out;
  out += "max_hash=" + std::to_string(max_hash) + "\n";
  out += "num_permutations=" + std::to_string(num_permutations) + "\n";
  out += "seed=" + std::to_string(seed) + "\n";
  out += "shingle_size=" + std::to_string(shingle_size) + "\n";
  return out;
}

uint32_t EncodingParams::fingerprint() const {
  return sha256_prefix32(canonical_text());
}

std::string preprocess_name(std::string_view name) {
  size_t begin = 0;
  size_t end = name.size();
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
           c == '\v';
  };
  while (begin < end && is_space(name[begin])) ++begin;
  while (end > begin && is_space(name[end - 1])) --end;
  std::string out(name.substr(begin, end - begin));
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = char(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> generate_shingles(std::string_view name,
                                           const EncodingParams& params) {
  params.validate();
  const size_t s = params.shingle_size;
  if (name.size() < s) {
    throw NameTooShort("name shorter than shingle size: \"" +
                       std::string(name) + "\"");
  }
  std::vector<std::string> shingles;
  shingles.reserve(name.size() - s + 1);
  for (size_t i = 0; i + s <= name.size(); ++i) {
    shingles.emplace_back(name.substr(i, s));
  }
  std::sort(shingles.begin(), shingles.end());
  shingles.erase(std::unique(shingles.begin(), shingles.end()),
                 shingles.end());
  return shingles;
}

MinHasher::MinHasher(const EncodingParams& params, uint32_t num_functions)
    : params_(params) {
  params_.validate();
  Prng rng(params.seed);
  mult_.reserve(num_functions);
  add_.reserve(num_functions);
  for (uint32_t i = 0; i < num_functions; ++i) {
    mult_.push_back(1 + rng.next_below(kMersenne61 - 1));  // in [1, p-1]
    add_.push_back(rng.next_below(kMersenne61));           // in [0, p-1]
  }
}

std::vector<uint32_t> MinHasher::sign(const std::vector<std::string>& shingles,
                                      uint32_t first, uint32_t count) const {
  std::vector<uint64_t> base;
  base.reserve(shingles.size());
  for (const auto& sh : shingles) {
    base.push_back(sha256_prefix64(sh) % kMersenne61);
  }
  std::vector<uint32_t> out(count);
  for (uint32_t i = 0; i < count; ++i) {
    const uint64_t a = mult_[first + i];
    const uint64_t b = add_[first + i];
    uint64_t best = UINT64_MAX;
    for (uint64_t x : base) {
      unsigned __int128 v = static_cast<unsigned __int128>(a) * x + b;
      uint64_t h = reduce_m61(v) % params_.max_hash;
      best = std::min(best, h);
    }
    out[i] = uint32_t(best);
  }
  return out;
}

MinHashSignature minhash_signature(std::string_view name,
                                   const EncodingParams& params) {
  MinHasher hasher(params, params.num_permutations);
  auto shingles = generate_shingles(preprocess_name(name), params);
  MinHashSignature sig;
  sig.values = hasher.sign(shingles, 0, params.num_permutations);
  sig.params_fingerprint = params.fingerprint();
  return sig;
}

DualEncoder::DualEncoder(const EncodingParams& base)
    : el200_params_(base),
      el50_params_(base),
      hasher_(base, kCentroidLength + kMatchLength) {
  el200_params_.num_permutations = kCentroidLength;
  el50_params_.num_permutations = kMatchLength;
}

DualSignature DualEncoder::encode(std::string_view name) const {
  auto shingles =
      generate_shingles(preprocess_name(name), hasher_.params());
  DualSignature out;
  out.el200.values = hasher_.sign(shingles, 0, kCentroidLength);
  out.el200.params_fingerprint = el200_params_.fingerprint();
  out.el50.values = hasher_.sign(shingles, kCentroidLength, kMatchLength);
  out.el50.params_fingerprint = el50_params_.fingerprint();
  return out;
}

DualSignature dual_signature(std::string_view name,
                             const EncodingParams& base) {
  return DualEncoder(base).encode(name);
}

std::vector<double> normalize(const std::vector<double>& values) {
  double nrm_sq = kernels::active().dot_f64(values.data(), values.data(),
                                            values.size());
  if (nrm_sq == 0.0) throw ZeroVector("cannot normalize the zero vector");
  double inv = 1.0 / std::sqrt(nrm_sq);
  std::vector<double> out(values.size());
  for (size_t i = 0; i < values.size(); ++i) out[i] = values[i] * inv;
  return out;
}

std::vector<double> normalize(const MinHashSignature& sig) {
  std::vector<double> v(sig.values.begin(), sig.values.end());
  return normalize(v);
}

ScalerParams fit_scaler(const std::vector<std::vector<double>>& dataset) {
  if (dataset.empty()) throw EmptyDataset("scaler needs a non-empty dataset");
  const size_t dim = dataset.front().size();
  ScalerParams out;
  out.means.assign(dim, 0.0);
  out.stds.assign(dim, 0.0);
  for (const auto& row : dataset) {
    if (row.size() != dim) throw DimensionMismatch("ragged scaler dataset");
    for (size_t i = 0; i < dim; ++i) out.means[i] += row[i];
  }
  const double inv_n = 1.0 / double(dataset.size());
  for (double& m : out.means) m *= inv_n;
  for (const auto& row : dataset) {
    for (size_t i = 0; i < dim; ++i) {
      double d = row[i] - out.means[i];
      out.stds[i] += d * d;
    }
  }
  for (double& s : out.stds) {
    s = std::sqrt(s * inv_n);  // population std
    if (s < 1e-9) s = 1e-9;
  }
  return out;
}

std::vector<double> standardize(const std::vector<double>& sig,
                                const ScalerParams& scaler) {
  if (sig.size() != scaler.means.size() || sig.size() != scaler.stds.size()) {
    throw DimensionMismatch("standardize: vector/scaler length mismatch");
  }
  std::vector<double> out(sig.size());
  for (size_t i = 0; i < sig.size(); ++i) {
    out[i] = (sig[i] - scaler.means[i]) / scaler.stds[i];
  }
  return out;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DimensionMismatch("cosine length mismatch");
  const auto& k = kernels::active();
  double num = k.dot_f64(a.data(), b.data(), a.size());
  double na = k.dot_f64(a.data(), a.data(), a.size());
  double nb = k.dot_f64(b.data(), b.data(), b.size());
  if (na == 0.0 || nb == 0.0) return 0.0;
  return num / std::sqrt(na * nb);
}

namespace {

void put_u16(std::string& buf, uint16_t v) {
  buf.push_back(char(v & 0xff));
  buf.push_back(char(v >> 8));
}

void put_u32(std::string& buf, uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(char((v >> (8 * i)) & 0xff));
}

uint16_t get_u16(const uint8_t* p) { return uint16_t(p[0]) | uint16_t(p[1]) << 8; }

uint32_t get_u32(const uint8_t* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
         uint32_t(p[3]) << 24;
}

}  // namespace

void write_signature_file(const std::string& path,
                          const std::vector<MinHashSignature>& sigs,
                          const EncodingParams& params) {
  std::string buf;
  buf += "MHSG";
  put_u16(buf, 1);  // version
  put_u16(buf, uint16_t(params.num_permutations));
  put_u32(buf, params.max_hash);
  put_u32(buf, params.fingerprint());
  for (const auto& sig : sigs) {
    if (sig.values.size() != params.num_permutations) {
      throw DimensionMismatch("signature length does not match params");
    }
    for (uint32_t v : sig.values) put_u32(buf, v);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(buf.data(), std::streamsize(buf.size()));
  if (!out) throw IoError("short write: " + path);
}

std::vector<MinHashSignature> read_signature_file(const std::string& path,
                                                  EncodingParams* params_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < 16 || buf.compare(0, 4, "MHSG") != 0) {
    throw IoError("not a MHSG signature file: " + path);
  }
  const uint8_t* p = reinterpret_cast<const uint8_t*>(buf.data());
  uint16_t version = get_u16(p + 4);
  if (version != 1) throw IoError("unsupported MHSG version");
  uint16_t perms = get_u16(p + 6);
  uint32_t max_hash = get_u32(p + 8);
  uint32_t fingerprint = get_u32(p + 12);
  if (params_out != nullptr) {
    params_out->num_permutations = perms;
    params_out->max_hash = max_hash;
  }
  size_t body = buf.size() - 16;
  size_t record = size_t(perms) * 4;
  if (record == 0 || body % record != 0) {
    throw IoError("truncated MHSG signature file: " + path);
  }
  std::vector<MinHashSignature> sigs(body / record);
  const uint8_t* cursor = p + 16;
  for (auto& sig : sigs) {
    sig.params_fingerprint = fingerprint;
    sig.values.resize(perms);
    for (auto& v : sig.values) {
      v = get_u32(cursor);
      cursor += 4;
    }
  }
  return sigs;
}

}  // namespace hefuzz::encoding
