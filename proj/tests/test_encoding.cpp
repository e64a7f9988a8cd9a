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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "doctest.h"
#include "hefuzz/common.hpp"
#include "hefuzz/encoding.hpp"
#include "hefuzz/eval.hpp"
#include "hefuzz/prng.hpp"

using namespace hefuzz;
using namespace hefuzz::encoding;

namespace {

EncodingParams params_with(uint32_t perms, uint64_t seed = 42) {
  EncodingParams p;
  p.num_permutations = perms;
  p.seed = seed;
  return p;
}

// Brute-force Jaccard of the two names' preprocessed shingle sets.
double exact_jaccard(const std::string& a, const std::string& b,
                     const EncodingParams& p) {
  auto sa = generate_shingles(preprocess_name(a), p);
  auto sb = generate_shingles(preprocess_name(b), p);
  std::set<std::string> seta(sa.begin(), sa.end());
  std::set<std::string> setb(sb.begin(), sb.end());
  size_t inter = 0;
  for (const auto& s : seta) inter += setb.count(s);
  size_t uni = seta.size() + setb.size() - inter;
  return uni == 0 ? 0.0 : double(inter) / double(uni);
}

double agreement_rate(const MinHashSignature& a, const MinHashSignature& b) {
  size_t agree = 0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    agree += a.values[i] == b.values[i] ? 1 : 0;
  }
  return double(agree) / double(a.values.size());
}

std::string random_name(Prng& rng, size_t len) {
  const std::string letters = "abcdefghijklmnopqrstuvwxyz";
  std::string s;
  for (size_t i = 0; i < len; ++i) {
    if (i == len / 2) {
      s.push_back(' ');
    } else {
      s.push_back(letters[rng.next_below(letters.size())]);
    }
  }
  return s;
}

}  // namespace

TEST_CASE("generate_shingles enumerates windows") {
  EncodingParams p = params_with(50);
  auto sh = generate_shingles("Mary Janes", p);
  std::set<std::string> got(sh.begin(), sh.end());
  std::set<std::string> want = {"Mar", "ary", "ry ", "y J", " Ja",
                                "Jan", "ane", "nes"};
  CHECK(got == want);

  CHECK(generate_shingles("abc", p) == std::vector<std::string>{"abc"});
  CHECK(generate_shingles("aaaa", p) == std::vector<std::string>{"aaa"});
  CHECK_THROWS_AS(generate_shingles("ab", p), NameTooShort);
}

TEST_CASE("preprocessing trims and lowercases, keeps interior spaces") {
  CHECK(preprocess_name("  Mary Janes \n") == "mary janes");
  CHECK(preprocess_name("ABC") == "abc");
  CHECK(preprocess_name("a  b") == "a  b");
}

TEST_CASE("minhash signature shape, range, determinism") {
  EncodingParams p = params_with(50);
  auto sig = minhash_signature("Mary Janes", p);
  CHECK(sig.values.size() == 50);
  for (uint32_t v : sig.values) CHECK(v < p.max_hash);
  CHECK(sig.params_fingerprint == p.fingerprint());

  // identical params on "two parties" produce identical vectors
  auto sig2 = minhash_signature("Mary Janes", params_with(50));
  CHECK(sig.values == sig2.values);

  // a different seed produces a different family
  auto sig3 = minhash_signature("Mary Janes", params_with(50, 43));
  CHECK(sig.values != sig3.values);

  CHECK_THROWS_AS(minhash_signature("ab", p), NameTooShort);
}

TEST_CASE("dual signature uses disjoint hash index ranges") {
  EncodingParams p = params_with(50);
  auto dual = dual_signature("Robert Miller", p);
  CHECK(dual.el200.values.size() == kCentroidLength);
  CHECK(dual.el50.values.size() == kMatchLength);
  // EL-50 comes from indices 200..249, so it differs from the standalone
  // 50-permutation signature (indices 0..49).
  auto standalone = minhash_signature("Robert Miller", p);
  CHECK(dual.el50.values != standalone.values);
  // while the first 50 coordinates of EL-200 equal the standalone signature
  std::vector<uint32_t> head(dual.el200.values.begin(),
                             dual.el200.values.begin() + 50);
  CHECK(head == standalone.values);
}

TEST_CASE("minhash agreement estimates jaccard") {
  EncodingParams p = params_with(200);
  double jaccard = exact_jaccard("Mary Janes", "Marie Jones", p);
  auto a = minhash_signature("Mary Janes", p);
  auto b = minhash_signature("Marie Jones", p);
  CHECK(std::abs(agreement_rate(a, b) - jaccard) < 0.15);
}

TEST_CASE("estimator property: MAE within the chernoff band at P=200") {
  EncodingParams p = params_with(200, 7);
  Prng rng(11);
  double total_err = 0.0;
  const int pairs = 120;
  for (int i = 0; i < pairs; ++i) {
    std::string base = random_name(rng, 8 + rng.next_below(8));
    std::string other;
    if (i % 2 == 0) {
      other = eval::perturb_to_ld(base, 1 + int(rng.next_below(3)), rng);
    } else {
      other = random_name(rng, 8 + rng.next_below(8));
    }
    double jac = exact_jaccard(base, other, p);
    double est = agreement_rate(minhash_signature(base, p),
                                minhash_signature(other, p));
    total_err += std::abs(est - jac);
  }
  CHECK(total_err / pairs <= 1.5 / std::sqrt(200.0));
}

TEST_CASE("normalize") {
  std::vector<double> v{3.0, 4.0};
  auto n = normalize(v);
  CHECK(n[0] == doctest::Approx(0.6));
  CHECK(n[1] == doctest::Approx(0.8));
  auto again = normalize(n);
  CHECK(again[0] == doctest::Approx(n[0]));

  EncodingParams p = params_with(50);
  auto sig = minhash_signature("Patricia Brown", p);
  auto unit = normalize(sig);
  double nrm = 0;
  for (double x : unit) nrm += x * x;
  CHECK(std::abs(std::sqrt(nrm) - 1.0) < 1e-9);

  CHECK_THROWS_AS(normalize(std::vector<double>{0.0, 0.0}), ZeroVector);
}

TEST_CASE("scaler: fit and standardize against two-pass reference") {
  SUBCASE("degenerate single vector") {
    std::vector<std::vector<double>> data{{0.5, 0.25}};
    auto s = fit_scaler(data);
    CHECK(s.means == std::vector<double>{0.5, 0.25});
    CHECK(s.stds == std::vector<double>{1e-9, 1e-9});
  }
  SUBCASE("two-point population stats") {
    std::vector<std::vector<double>> data{{1.0, 0.0}, {0.0, 1.0}};
    auto s = fit_scaler(data);
    CHECK(s.means[0] == doctest::Approx(0.5));
    CHECK(s.stds[0] == doctest::Approx(0.5));
  }
  SUBCASE("mean of standardized dataset is zero") {
    Prng rng(5);
    EncodingParams p = params_with(50, 3);
    std::vector<std::vector<double>> data;
    for (int i = 0; i < 40; ++i) {
      data.push_back(normalize(minhash_signature(random_name(rng, 12), p)));
    }
    auto scaler = fit_scaler(data);
    // independent two-pass reference
    for (size_t d = 0; d < 50; ++d) {
      double mean = 0;
      for (const auto& row : data) mean += row[d];
      mean /= double(data.size());
      double var = 0;
      for (const auto& row : data) var += (row[d] - mean) * (row[d] - mean);
      double stddev = std::sqrt(var / double(data.size()));
      CHECK(scaler.means[d] == doctest::Approx(mean).epsilon(1e-9));
      CHECK(scaler.stds[d] ==
            doctest::Approx(std::max(stddev, 1e-9)).epsilon(1e-9));
    }
    std::vector<double> colsum(50, 0.0);
    for (const auto& row : data) {
      auto z = standardize(row, scaler);
      for (size_t d = 0; d < 50; ++d) colsum[d] += z[d];
    }
    for (double c : colsum) CHECK(std::abs(c / double(data.size())) < 1e-9);
  }
  SUBCASE("identity and zero cases") {
    ScalerParams ident;
    ident.means = {0.0, 0.0};
    ident.stds = {1.0, 1.0};
    std::vector<double> v{0.3, -0.7};
    CHECK(standardize(v, ident) == v);
    ScalerParams s;
    s.means = v;
    s.stds = {1.0, 1.0};
    auto z = standardize(v, s);
    CHECK(z == std::vector<double>{0.0, 0.0});
    CHECK_THROWS_AS(standardize({1.0}, ident), DimensionMismatch);
  }
  CHECK_THROWS_AS(fit_scaler({}), EmptyDataset);
}

TEST_CASE("cosine is non-increasing in edit distance on average") {
  Prng rng(17);
  EncodingParams p = params_with(200, 9);
  std::vector<double> mean_cos(6, 0.0);
  const int pairs = 210;
  for (int i = 0; i < pairs; ++i) {
    std::string base = random_name(rng, 10 + rng.next_below(6));
    auto base_sig = normalize(minhash_signature(base, p));
    for (int ld = 0; ld <= 5; ++ld) {
      std::string other = eval::perturb_to_ld(base, ld, rng);
      auto sig = normalize(minhash_signature(other, p));
      mean_cos[size_t(ld)] += cosine(base_sig, sig);
    }
  }
  for (auto& m : mean_cos) m /= pairs;
  CHECK(mean_cos[0] == doctest::Approx(1.0).epsilon(1e-9));
  for (int ld = 1; ld <= 5; ++ld) {
    CHECK(mean_cos[size_t(ld)] <= mean_cos[size_t(ld - 1)] + 1e-9);
  }
}

TEST_CASE("self-cosine is 1 regardless of length") {
  EncodingParams p = params_with(50);
  for (const std::string name :
       {"Bo Li", "Alexandria Richardson-Vasquez", "Jo Kim Park"}) {
    auto sig = normalize(minhash_signature(name, p));
    CHECK(std::abs(cosine(sig, sig) - 1.0) < 1e-9);
  }
}

TEST_CASE("params fingerprint binds every field") {
  EncodingParams a = params_with(50, 1);
  EncodingParams b = a;
  CHECK(a.fingerprint() == b.fingerprint());
  b.seed = 2;
  CHECK(a.fingerprint() != b.fingerprint());
  b = a;
  b.max_hash = 1 << 19;
  CHECK(a.fingerprint() != b.fingerprint());
}

TEST_CASE("signature file roundtrip") {
  EncodingParams p = params_with(50, 21);
  std::vector<MinHashSignature> sigs;
  for (const std::string name : {"Jane Smith", "Robert Jones", "Al Garcia"}) {
    sigs.push_back(minhash_signature(name, p));
  }
  std::string path = "test_sigs.mhsg";
  write_signature_file(path, sigs, p);
  EncodingParams read_params;
  auto back = read_signature_file(path, &read_params);
  REQUIRE(back.size() == sigs.size());
  for (size_t i = 0; i < sigs.size(); ++i) {
    CHECK(back[i].values == sigs[i].values);
    CHECK(back[i].params_fingerprint == p.fingerprint());
  }
  CHECK(read_params.num_permutations == 50);
  CHECK(read_params.max_hash == p.max_hash);
  std::remove(path.c_str());
}
