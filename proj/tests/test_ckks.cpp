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

#include <cmath>

#include "doctest.h"
#include "hefuzz/ckks/engine.hpp"
#include "hefuzz/ckks/plain_backend.hpp"
#include "hefuzz/ckks/serialize.hpp"
#include "hefuzz/common.hpp"
#include "hefuzz/prng.hpp"

using namespace hefuzz;
using namespace hefuzz::ckks;

namespace {

// Small ring keeps the randomized suites fast; parameter-sensitive checks use
// the production-scale ring in the acceptance suite.
HeParams toy_params() {
  HeParams p;
  p.ring_degree = 1024;
  p.modulus_bits = {50, 40, 40, 50};
  p.scale = std::ldexp(1.0, 40);
  p.secret_hamming_weight = 64;
  return p;
}

HeParams deep_params() {
  HeParams p;
  p.ring_degree = 1024;
  p.modulus_bits = {60, 40, 40, 40, 60};
  p.scale = std::ldexp(1.0, 40);
  p.secret_hamming_weight = 64;
  return p;
}

std::vector<double> random_slots(const Context& ctx, Prng& rng, double lo,
                                 double hi) {
  std::vector<double> v(ctx.slots());
  for (auto& x : v) x = rng.next_in(lo, hi);
  return v;
}

double max_err(const std::vector<double>& got, const std::vector<double>& want) {
  double err = 0.0;
  for (size_t i = 0; i < want.size(); ++i) {
    err = std::max(err, std::abs(got[i] - want[i]));
  }
  return err;
}

}  // namespace

TEST_CASE("params validation and security table") {
  HeParams p;  // defaults: N=8192, [60,40,40,60]
  p.validate();
  CHECK(p.security_bits() == 128);
  CHECK(p.slot_count() == 4096);

  HeParams bad = p;
  bad.ring_degree = 1000;
  CHECK_THROWS_AS(bad.validate(), InvalidParams);
  bad = p;
  bad.modulus_bits = {60, 40};
  CHECK_THROWS_AS(bad.validate(), InvalidParams);
  bad = p;
  bad.scale = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidParams);

  // params text roundtrip
  auto text = serialize_params(p);
  auto back = deserialize_params(text);
  CHECK(back == p);
}

TEST_CASE("encode/decode roundtrip and additivity") {
  auto ctx = Context::create(toy_params());
  Prng rng(1);
  auto v = random_slots(*ctx, rng, -1.0, 1.0);
  auto pt = encode(*ctx, v, ctx->params().scale, uint32_t(ctx->top_level()));
  auto got = decode(*ctx, pt);
  CHECK(max_err(got, v) < std::ldexp(1.0, -20));

  SUBCASE("specific values") {
    std::vector<double> vals{0.5, -0.25, 1.0};
    auto p2 = encode(*ctx, vals, ctx->params().scale, 0);
    auto d2 = decode(*ctx, p2);
    for (size_t i = 0; i < vals.size(); ++i) {
      CHECK(std::abs(d2[i] - vals[i]) < std::ldexp(1.0, -20));
    }
    for (size_t i = vals.size(); i < d2.size(); ++i) {
      CHECK(std::abs(d2[i]) < std::ldexp(1.0, -20));
    }
  }
  SUBCASE("zero vector encodes to the zero polynomial") {
    std::vector<double> zeros(8, 0.0);
    auto pz = encode(*ctx, zeros, ctx->params().scale, 0);
    for (uint64_t c : pz.poly.data) CHECK(c == 0);
  }
  SUBCASE("sum of encodings decodes to the vector sum") {
    auto w = random_slots(*ctx, rng, -1.0, 1.0);
    auto pa = encode(*ctx, v, ctx->params().scale, 0);
    auto pb = encode(*ctx, w, ctx->params().scale, 0);
    // exact vector-addition oracle
    std::vector<double> want(v.size());
    for (size_t i = 0; i < v.size(); ++i) want[i] = v[i] + w[i];
    Plaintext sum = pa;
    for (size_t i = 0; i < sum.poly.data.size(); ++i) {
      sum.poly.data[i] = kernels::add_mod1(pa.poly.data[i], pb.poly.data[i],
                                           ctx->prime(0));
    }
    CHECK(max_err(decode(*ctx, sum), want) < std::ldexp(1.0, -19));
  }
  SUBCASE("too many slots") {
    std::vector<double> big(ctx->slots() + 1, 0.0);
    CHECK_THROWS_AS(
        encode(*ctx, big, ctx->params().scale, 0), TooManySlots);
  }
}

TEST_CASE("keygen and encryption") {
  auto ctx = Context::create(toy_params());
  auto keys = keygen(*ctx, 11);

  SUBCASE("zero roundtrip validates the key equation") {
    std::vector<double> zeros(ctx->slots(), 0.0);
    auto ct = encrypt(*ctx, keys.pub,
                      encode(*ctx, zeros, ctx->params().scale,
                             uint32_t(ctx->top_level())));
    auto got = decrypt_values(*ctx, keys.secret, ct, ctx->slots());
    CHECK(max_err(got, zeros) < 1e-5);
    auto report = measure_noise(*ctx, keys.secret, ct, zeros);
    CHECK(report.measured <= noise_clean(ctx->params()));
  }
  SUBCASE("different seeds give different public keys") {
    auto other = keygen(*ctx, 12);
    CHECK(keys.pub.b.data != other.pub.b.data);
  }
  SUBCASE("random roundtrip under 1e-6") {
    Prng rng(2);
    auto v = random_slots(*ctx, rng, -1.0, 1.0);
    auto ct = encrypt(*ctx, keys.pub,
                      encode(*ctx, v, ctx->params().scale,
                             uint32_t(ctx->top_level())));
    CHECK(max_err(decrypt_values(*ctx, keys.secret, ct, v.size()), v) < 1e-6);
  }
  SUBCASE("encryption is randomized") {
    std::vector<double> v(ctx->slots(), 0.5);
    auto pt = encode(*ctx, v, ctx->params().scale, uint32_t(ctx->top_level()));
    auto a = encrypt(*ctx, keys.pub, pt);
    auto b = encrypt(*ctx, keys.pub, pt);
    CHECK(a.c0.data != b.c0.data);
  }
}

TEST_CASE("add, add_plain, sub") {
  auto ctx = Context::create(toy_params());
  auto keys = keygen(*ctx, 21);
  Prng rng(3);
  auto v = random_slots(*ctx, rng, -1.0, 1.0);
  const uint32_t top = uint32_t(ctx->top_level());
  auto ct = encrypt(*ctx, keys.pub, encode(*ctx, v, ctx->params().scale, top));

  SUBCASE("ct + (-ct) is zero") {
    std::vector<double> neg(v.size());
    for (size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
    auto ct_neg =
        encrypt(*ctx, keys.pub, encode(*ctx, neg, ctx->params().scale, top));
    auto sum = add(*ctx, ct, ct_neg);
    std::vector<double> zeros(v.size(), 0.0);
    CHECK(max_err(decrypt_values(*ctx, keys.secret, sum, v.size()), zeros) <
          1e-5);
  }
  SUBCASE("double and noise additivity") {
    auto doubled = add(*ctx, ct, ct);
    std::vector<double> want(v.size());
    for (size_t i = 0; i < v.size(); ++i) want[i] = 2 * v[i];
    CHECK(max_err(decrypt_values(*ctx, keys.secret, doubled, v.size()), want) <
          1e-5);
    CHECK(doubled.noise_bound == doctest::Approx(2 * ct.noise_bound));
    auto report = measure_noise(*ctx, keys.secret, doubled, want);
    CHECK(report.measured <= report.bound);
  }
  SUBCASE("add_plain shifts every slot") {
    auto shifted = add_plain(*ctx, ct, -0.9);
    std::vector<double> want(v.size());
    for (size_t i = 0; i < v.size(); ++i) want[i] = v[i] - 0.9;
    CHECK(max_err(decrypt_values(*ctx, keys.secret, shifted, v.size()), want) <
          1e-5);
  }
  SUBCASE("level mismatch is rejected") {
    auto dropped = drop_to_level(*ctx, ct, top - 1);
    CHECK_THROWS_AS(add(*ctx, ct, dropped), LevelMismatch);
  }
}

TEST_CASE("scale mismatch rejected") {
  auto ctx = Context::create(toy_params());
  auto keys = keygen(*ctx, 23);
  std::vector<double> v(ctx->slots(), 0.25);
  auto ct = encrypt(*ctx, keys.pub,
                    encode(*ctx, v, ctx->params().scale,
                           uint32_t(ctx->top_level())));
  auto other = ct;
  other.scale *= 2.0;
  CHECK_THROWS_AS(add(*ctx, ct, other), ScaleMismatch);
}

TEST_CASE("mul and mul_plain against exact oracles") {
  auto ctx = Context::create(toy_params());
  auto keys = keygen(*ctx, 31);
  Prng rng(4);
  const uint32_t top = uint32_t(ctx->top_level());
  auto v = random_slots(*ctx, rng, -1.0, 1.0);
  auto w = random_slots(*ctx, rng, -1.0, 1.0);
  auto ct_v = encrypt(*ctx, keys.pub, encode(*ctx, v, ctx->params().scale, top));
  auto ct_w = encrypt(*ctx, keys.pub, encode(*ctx, w, ctx->params().scale, top));

  SUBCASE("identity constant keeps values, drops a level") {
    auto out = mul_plain(*ctx, ct_v, 1.0);
    CHECK(out.level == top - 1);
    CHECK(max_err(decrypt_values(*ctx, keys.secret, out, v.size()), v) < 1e-5);
  }
  SUBCASE("hadamard product within 1e-4") {
    auto out = mul(*ctx, ct_v, ct_w, keys.relin);
    std::vector<double> want(v.size());
    for (size_t i = 0; i < v.size(); ++i) want[i] = v[i] * w[i];
    CHECK(max_err(decrypt_values(*ctx, keys.secret, out, v.size()), want) <
          1e-4);
    auto report = measure_noise(*ctx, keys.secret, out, want);
    CHECK(report.measured <= report.bound);
  }
  SUBCASE("vector plaintext multiplier") {
    auto pt = encode(*ctx, w, ctx->params().scale, top);
    auto out = mul_plain(*ctx, ct_v, pt);
    std::vector<double> want(v.size());
    for (size_t i = 0; i < v.size(); ++i) want[i] = v[i] * w[i];
    CHECK(max_err(decrypt_values(*ctx, keys.secret, out, v.size()), want) <
          1e-4);
  }
}

TEST_CASE("level accounting: three multiplications, then exhausted") {
  auto ctx = Context::create(deep_params());
  auto keys = keygen(*ctx, 41);
  Prng rng(5);
  auto v = random_slots(*ctx, rng, -1.0, 1.0);
  const uint32_t top = uint32_t(ctx->top_level());
  REQUIRE(top == 3);
  auto ct = encrypt(*ctx, keys.pub, encode(*ctx, v, ctx->params().scale, top));

  // selection-style ct x plain
  auto after1 = mul_plain(*ctx, ct, 0.5);
  CHECK(after1.level == 2);
  // similarity-style ct x ct
  auto peer = drop_to_level(*ctx, ct, after1.level);
  auto after2 = mul(*ctx, after1, peer, keys.relin);
  CHECK(after2.level == 1);
  // masking ct x plain
  auto after3 = mul_plain(*ctx, add_plain(*ctx, after2, -0.9), 7.0);
  CHECK(after3.level == 0);
  // a fourth multiplication has no prime left to rescale into
  CHECK_THROWS_AS(mul_plain(*ctx, after3, 2.0), LevelExhausted);
  CHECK_THROWS_AS(mul(*ctx, after3, after3, keys.relin), LevelExhausted);

  // the deep value is still correct: ((v*0.5)*v - 0.9) * 7
  std::vector<double> want(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    want[i] = (v[i] * 0.5 * v[i] - 0.9) * 7.0;
  }
  CHECK(max_err(decrypt_values(*ctx, keys.secret, after3, v.size()), want) <
        2e-3);
}

TEST_CASE("dot_ct_pt: selection and random oracles") {
  auto ctx = Context::create(toy_params());
  auto keys = keygen(*ctx, 51);
  Prng rng(6);
  const uint32_t top = uint32_t(ctx->top_level());
  const size_t d = 50;
  std::vector<Ciphertext> cts;
  std::vector<std::vector<double>> values;
  for (size_t i = 0; i < d; ++i) {
    values.push_back(random_slots(*ctx, rng, -1.0, 1.0));
    cts.push_back(encrypt(*ctx, keys.pub,
                          encode(*ctx, values.back(), ctx->params().scale,
                                 top)));
  }

  SUBCASE("one-hot selects a coordinate") {
    std::vector<double> plains(d, 0.0);
    plains[2] = 1.0;
    auto out = dot_ct_pt(*ctx, cts, plains);
    CHECK(max_err(decrypt_values(*ctx, keys.secret, out, ctx->slots()),
                  values[2]) < 1e-4);
  }
  SUBCASE("zero weights give zero") {
    std::vector<double> plains(d, 0.0);
    auto out = dot_ct_pt(*ctx, cts, plains);
    std::vector<double> zeros(ctx->slots(), 0.0);
    CHECK(max_err(decrypt_values(*ctx, keys.secret, out, ctx->slots()), zeros) <
          1e-5);
  }
  SUBCASE("random weights match the exact dot product") {
    std::vector<double> plains(d);
    for (auto& p : plains) p = rng.next_in(-1.0, 1.0);
    std::vector<double> want(ctx->slots(), 0.0);
    for (size_t i = 0; i < d; ++i) {
      for (size_t s = 0; s < want.size(); ++s) {
        want[s] += values[i][s] * plains[i];
      }
    }
    auto out = dot_ct_pt(*ctx, cts, plains);
    CHECK(max_err(decrypt_values(*ctx, keys.secret, out, ctx->slots()), want) <
          1e-4);
    auto report = measure_noise(*ctx, keys.secret, out, want);
    CHECK(report.measured <= report.bound);
  }
  SUBCASE("length mismatch") {
    std::vector<double> plains(d - 1, 0.0);
    CHECK_THROWS_AS(dot_ct_pt(*ctx, cts, plains), DimensionMismatch);
  }
}

TEST_CASE("dot_ct_ct: cosine of unit vectors") {
  auto ctx = Context::create(toy_params());
  auto keys = keygen(*ctx, 61);
  Prng rng(7);
  const uint32_t top = uint32_t(ctx->top_level());
  const size_t d = 50;

  // one unit vector per coordinate batch, same vector encrypted twice
  std::vector<double> unit(d);
  double nrm = 0.0;
  for (auto& x : unit) {
    x = rng.next_in(0.0, 1.0);
    nrm += x * x;
  }
  for (auto& x : unit) x /= std::sqrt(nrm);

  std::vector<Ciphertext> a, b;
  for (size_t i = 0; i < d; ++i) {
    std::vector<double> slots(ctx->slots(), unit[i]);
    auto pt = encode(*ctx, slots, ctx->params().scale, top);
    a.push_back(encrypt(*ctx, keys.pub, pt));
    b.push_back(encrypt(*ctx, keys.pub, pt));
  }
  auto self = dot_ct_ct(*ctx, a, b, keys.relin);
  auto got = decrypt_values(*ctx, keys.secret, self, ctx->slots());
  for (double g : got) CHECK(std::abs(g - 1.0) < 1e-3);

  SUBCASE("orthogonal vectors give zero") {
    std::vector<Ciphertext> e0, e1;
    for (size_t i = 0; i < 4; ++i) {
      std::vector<double> s0(ctx->slots(), i == 0 ? 1.0 : 0.0);
      std::vector<double> s1(ctx->slots(), i == 1 ? 1.0 : 0.0);
      e0.push_back(encrypt(*ctx, keys.pub,
                           encode(*ctx, s0, ctx->params().scale, top)));
      e1.push_back(encrypt(*ctx, keys.pub,
                           encode(*ctx, s1, ctx->params().scale, top)));
    }
    auto out = dot_ct_ct(*ctx, e0, e1, keys.relin);
    auto vals = decrypt_values(*ctx, keys.secret, out, ctx->slots());
    for (double v : vals) CHECK(std::abs(v) < 1e-3);
  }
}

TEST_CASE("slot batching isolates slots") {
  auto ctx = Context::create(toy_params());
  auto keys = keygen(*ctx, 71);
  Prng rng(8);
  const uint32_t top = uint32_t(ctx->top_level());
  auto v = random_slots(*ctx, rng, -1.0, 1.0);
  auto w = v;
  w[5] += 0.25;  // perturb one slot's input

  auto ct_v = encrypt(*ctx, keys.pub, encode(*ctx, v, ctx->params().scale, top));
  auto ct_w = encrypt(*ctx, keys.pub, encode(*ctx, w, ctx->params().scale, top));
  auto out_v = mul_plain(*ctx, add_plain(*ctx, ct_v, -0.3), 2.0);
  auto out_w = mul_plain(*ctx, add_plain(*ctx, ct_w, -0.3), 2.0);
  auto dv = decrypt_values(*ctx, keys.secret, out_v, v.size());
  auto dw = decrypt_values(*ctx, keys.secret, out_w, w.size());
  for (size_t s = 0; s < v.size(); ++s) {
    if (s == 5) {
      CHECK(std::abs(dw[s] - dv[s] - 0.5) < 1e-4);
    } else {
      CHECK(std::abs(dw[s] - dv[s]) < 1e-4);
    }
  }
}

TEST_CASE("backend equivalence against the plaintext oracle") {
  auto params = toy_params();
  auto ctx = Context::create(params);
  auto keys = keygen(*ctx, 81);
  plain::PlainBackend oracle(params);
  std::vector<double> primes;
  for (size_t i = 0; i < ctx->chain_count(); ++i) primes.push_back(ctx->prime_d(i));
  oracle.set_prime_values(primes);

  Prng rng(9);
  const uint32_t top = uint32_t(ctx->top_level());
  const int cases_per_op = 200;
  for (int trial = 0; trial < 5 * cases_per_op; ++trial) {
    auto v = random_slots(*ctx, rng, -1.0, 1.0);
    auto w = random_slots(*ctx, rng, -1.0, 1.0);
    double c = rng.next_in(-2.0, 2.0);

    auto he_v = encrypt(*ctx, keys.pub, encode(*ctx, v, params.scale, top));
    auto he_w = encrypt(*ctx, keys.pub, encode(*ctx, w, params.scale, top));
    auto pl_v = oracle.encrypt(v);
    auto pl_w = oracle.encrypt(w);

    int op = trial % 5;
    std::vector<double> he_out, pl_out;
    double tol = 1e-4;
    switch (op) {
      case 0:
        he_out = decrypt_values(*ctx, keys.secret, add(*ctx, he_v, he_w),
                                ctx->slots());
        pl_out = oracle.decrypt(oracle.add(pl_v, pl_w));
        tol = 1e-5;
        break;
      case 1:
        he_out = decrypt_values(*ctx, keys.secret, add_plain(*ctx, he_v, c),
                                ctx->slots());
        pl_out = oracle.decrypt(oracle.add_plain(pl_v, c));
        tol = 1e-5;
        break;
      case 2:
        he_out = decrypt_values(*ctx, keys.secret, mul_plain(*ctx, he_v, c),
                                ctx->slots());
        pl_out = oracle.decrypt(oracle.mul_plain(pl_v, c));
        break;
      case 3:
        he_out = decrypt_values(*ctx, keys.secret,
                                mul(*ctx, he_v, he_w, keys.relin),
                                ctx->slots());
        pl_out = oracle.decrypt(oracle.mul(pl_v, pl_w));
        break;
      default: {
        std::vector<Ciphertext> cts{he_v, he_w};
        std::vector<plain::PlainCt> pls{pl_v, pl_w};
        std::vector<double> plains{c, -c};
        he_out = decrypt_values(*ctx, keys.secret,
                                dot_ct_pt(*ctx, cts, plains), ctx->slots());
        pl_out = oracle.decrypt(oracle.dot_ct_pt(pls, plains));
        break;
      }
    }
    REQUIRE(he_out.size() == pl_out.size());
    CHECK(max_err(he_out, pl_out) < tol);
  }
}

TEST_CASE("rescale noise stays within one B_scale") {
  auto ctx = Context::create(toy_params());
  auto keys = keygen(*ctx, 91);
  Prng rng(10);
  auto v = random_slots(*ctx, rng, -1.0, 1.0);
  auto ct = encrypt(*ctx, keys.pub,
                    encode(*ctx, v, ctx->params().scale,
                           uint32_t(ctx->top_level())));
  auto out = mul_plain(*ctx, ct, 1.0);  // one product + one rescale
  auto report = measure_noise(*ctx, keys.secret, out, v);
  // bound after the (scaled) product and a single rescale
  double pre = ct.noise_bound * (ctx->params().scale + 1.0);
  double want = pre / ctx->prime_d(ct.level) + noise_scale(ctx->params());
  CHECK(report.measured <= want);
}

TEST_CASE("ciphertext serialization") {
  auto ctx = Context::create(toy_params());
  auto keys = keygen(*ctx, 101);
  Prng rng(11);
  auto v = random_slots(*ctx, rng, -1.0, 1.0);
  auto ct = encrypt(*ctx, keys.pub,
                    encode(*ctx, v, ctx->params().scale,
                           uint32_t(ctx->top_level())));
  auto blob = serialize_ciphertext(*ctx, ct);
  CHECK(blob.size() == ciphertext_wire_size(*ctx, ct.level));
  auto back = deserialize_ciphertext(*ctx, blob);
  CHECK(back.level == ct.level);
  CHECK(back.scale == ct.scale);
  CHECK(max_err(decrypt_values(*ctx, keys.secret, back, v.size()), v) < 1e-6);

  // sizes shrink with level
  auto dropped = drop_to_level(*ctx, ct, 0);
  CHECK(serialize_ciphertext(*ctx, dropped).size() <
        serialize_ciphertext(*ctx, ct).size());

  CHECK_THROWS_AS(deserialize_ciphertext(*ctx, "garbage"), FrameCorrupt);
  CHECK_THROWS_AS(serialize_ciphertext(*ctx, ct, true), ConfigError);

  // key blobs roundtrip to working material
  auto pk_blob = serialize_public_key(*ctx, keys.pub);
  auto pk = deserialize_public_key(*ctx, pk_blob);
  auto ct2 = encrypt(*ctx, pk,
                     encode(*ctx, v, ctx->params().scale,
                            uint32_t(ctx->top_level())));
  CHECK(max_err(decrypt_values(*ctx, keys.secret, ct2, v.size()), v) < 1e-6);
  auto rlk = deserialize_relin_key(*ctx, serialize_relin_key(*ctx, keys.relin));
  auto prod = mul(*ctx, ct, ct2, rlk);
  std::vector<double> want(v.size());
  for (size_t i = 0; i < v.size(); ++i) want[i] = v[i] * v[i];
  CHECK(max_err(decrypt_values(*ctx, keys.secret, prod, v.size()), want) <
        1e-4);
  auto sk = deserialize_secret_key(*ctx, serialize_secret_key(*ctx, keys.secret));
  CHECK(max_err(decrypt_values(*ctx, sk, ct, v.size()), v) < 1e-6);
}
