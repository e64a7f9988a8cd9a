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

#include "hefuzz/ckks/serialize.hpp"

#include <cstring>
#include <sstream>

#include "hefuzz/common.hpp"

namespace hefuzz::ckks {

namespace {

void put_u16(std::string& b, uint16_t v) {
  b.push_back(char(v & 0xff));
  b.push_back(char(v >> 8));
}
void put_u32(std::string& b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(char((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& b, uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back(char((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& b, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(b, bits);
}

struct Reader {
  const uint8_t* p;
  const uint8_t* end;
  void need(size_t n) const {
    if (size_t(end - p) < n) throw FrameCorrupt("truncated ckks blob");
  }
  uint8_t u8() {
    need(1);
    return *p++;
  }
  uint16_t u16() {
    need(2);
    uint16_t v = uint16_t(p[0]) | uint16_t(p[1]) << 8;
    p += 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(p[i]) << (8 * i);
    p += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(p[i]) << (8 * i);
    p += 8;
    return v;
  }
  double f64() {
    uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
};

void put_poly(std::string& b, const RnsPoly& poly, size_t n) {
  for (uint32_t c = 0; c < poly.components; ++c) {
    const uint64_t* src = poly.comp(c, n);
    for (size_t i = 0; i < n; ++i) put_u64(b, src[i]);
  }
}

RnsPoly get_poly(Reader& r, uint32_t components, size_t n, bool ntt) {
  RnsPoly poly;
  poly.components = components;
  poly.ntt_form = ntt;
  poly.data.resize(size_t(components) * n);
  for (uint64_t& v : poly.data) v = r.u64();
  return poly;
}

}  // namespace

size_t ciphertext_wire_size(const Context& ctx, uint32_t level) {
  return 21 + size_t(2) * (level + 1) * ctx.n() * 8;
}

std::string serialize_ciphertext(const Context& ctx, const Ciphertext& ct,
                                 bool compress) {
  if (compress) {
    throw ConfigError("zstd compression requested but not compiled in");
  }
  std::string b;
  b.reserve(ciphertext_wire_size(ctx, ct.level));
  b += "CKCT";
  put_u16(b, 1);
  put_u32(b, uint32_t(ctx.n()));
  b.push_back(char(ct.level));
  put_f64(b, ct.scale);
  b.push_back(char(ct.level + 1));  // num_moduli
  b.push_back(char(0));             // compression flag
  put_poly(b, ct.c0, ctx.n());
  put_poly(b, ct.c1, ctx.n());
  return b;
}

Ciphertext deserialize_ciphertext(const Context& ctx, std::string_view bytes) {
  if (bytes.size() < 21 || bytes.compare(0, 4, "CKCT") != 0) {
    throw FrameCorrupt("not a CKCT blob");
  }
  Reader r{reinterpret_cast<const uint8_t*>(bytes.data()) + 4,
           reinterpret_cast<const uint8_t*>(bytes.data()) + bytes.size()};
  if (r.u16() != 1) throw FrameCorrupt("unsupported CKCT version");
  uint32_t n = r.u32();
  if (n != ctx.n()) throw FrameCorrupt("ring degree mismatch");
  uint8_t level = r.u8();
  double scale = r.f64();
  uint8_t num_moduli = r.u8();
  uint8_t flag = r.u8();
  if (flag != 0) throw ConfigError("compressed CKCT not supported");
  if (num_moduli != level + 1 || level > ctx.top_level()) {
    throw FrameCorrupt("CKCT modulus count mismatch");
  }
  Ciphertext ct;
  ct.level = level;
  ct.scale = scale;
  ct.c0 = get_poly(r, level + 1, n, true);
  ct.c1 = get_poly(r, level + 1, n, true);
  // Bounds are local bookkeeping and do not travel.
  ct.value_bound = 0.0;
  ct.noise_bound = 0.0;
  return ct;
}

std::string serialize_public_key(const Context& ctx, const PublicKey& pk) {
  std::string b;
  b += "CKPK";
  put_u16(b, 1);
  put_u32(b, uint32_t(ctx.n()));
  b.push_back(char(pk.b.components));
  put_poly(b, pk.b, ctx.n());
  put_poly(b, pk.a, ctx.n());
  return b;
}

PublicKey deserialize_public_key(const Context& ctx, std::string_view bytes) {
  if (bytes.size() < 11 || bytes.compare(0, 4, "CKPK") != 0) {
    throw FrameCorrupt("not a CKPK blob");
  }
  Reader r{reinterpret_cast<const uint8_t*>(bytes.data()) + 4,
           reinterpret_cast<const uint8_t*>(bytes.data()) + bytes.size()};
  if (r.u16() != 1) throw FrameCorrupt("unsupported CKPK version");
  if (r.u32() != ctx.n()) throw FrameCorrupt("ring degree mismatch");
  uint8_t comps = r.u8();
  PublicKey pk;
  pk.b = get_poly(r, comps, ctx.n(), true);
  pk.a = get_poly(r, comps, ctx.n(), true);
  return pk;
}

std::string serialize_relin_key(const Context& ctx, const RelinKey& rlk) {
  std::string b;
  b += "CKRK";
  put_u16(b, 1);
  put_u32(b, uint32_t(ctx.n()));
  b.push_back(char(rlk.b.size()));
  b.push_back(char(rlk.b.empty() ? 0 : rlk.b[0].components));
  for (size_t j = 0; j < rlk.b.size(); ++j) {
    put_poly(b, rlk.b[j], ctx.n());
    put_poly(b, rlk.a[j], ctx.n());
  }
  return b;
}

RelinKey deserialize_relin_key(const Context& ctx, std::string_view bytes) {
  if (bytes.size() < 12 || bytes.compare(0, 4, "CKRK") != 0) {
    throw FrameCorrupt("not a CKRK blob");
  }
  Reader r{reinterpret_cast<const uint8_t*>(bytes.data()) + 4,
           reinterpret_cast<const uint8_t*>(bytes.data()) + bytes.size()};
  if (r.u16() != 1) throw FrameCorrupt("unsupported CKRK version");
  if (r.u32() != ctx.n()) throw FrameCorrupt("ring degree mismatch");
  uint8_t digits = r.u8();
  uint8_t comps = r.u8();
  RelinKey rlk;
  for (uint8_t j = 0; j < digits; ++j) {
    rlk.b.push_back(get_poly(r, comps, ctx.n(), true));
    rlk.a.push_back(get_poly(r, comps, ctx.n(), true));
  }
  return rlk;
}

std::string serialize_secret_key(const Context& ctx, const SecretKey& sk) {
  std::string b;
  b += "CKSK";
  put_u16(b, 1);
  put_u32(b, uint32_t(ctx.n()));
  b.push_back(char(sk.s.components));
  put_poly(b, sk.s, ctx.n());
  return b;
}

SecretKey deserialize_secret_key(const Context& ctx, std::string_view bytes) {
  if (bytes.size() < 11 || bytes.compare(0, 4, "CKSK") != 0) {
    throw FrameCorrupt("not a CKSK blob");
  }
  Reader r{reinterpret_cast<const uint8_t*>(bytes.data()) + 4,
           reinterpret_cast<const uint8_t*>(bytes.data()) + bytes.size()};
  if (r.u16() != 1) throw FrameCorrupt("unsupported CKSK version");
  if (r.u32() != ctx.n()) throw FrameCorrupt("ring degree mismatch");
  uint8_t comps = r.u8();
  SecretKey sk;
  sk.s = get_poly(r, comps, ctx.n(), true);
  return sk;
}

std::string serialize_params(const HeParams& params) {
  return params.canonical_text();
}

HeParams deserialize_params(std::string_view bytes) {
  HeParams p;
  p.modulus_bits.clear();
  std::istringstream in{std::string(bytes)};
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    if (key == "ring_degree") {
      p.ring_degree = uint32_t(std::stoul(val));
    } else if (key == "scale") {
      p.scale = std::stod(val);
    } else if (key == "error_stddev") {
      p.error_stddev = std::stod(val);
    } else if (key == "secret_hamming_weight") {
      p.secret_hamming_weight = uint32_t(std::stoul(val));
    } else if (key == "special_modulus_bits") {
      p.special_modulus_bits = std::stoi(val);
    } else if (key == "modulus_bits") {
      std::istringstream list(val);
      std::string item;
      while (std::getline(list, item, ',')) {
        p.modulus_bits.push_back(std::stoi(item));
      }
    }
  }
  p.validate();
  return p;
}

}  // namespace hefuzz::ckks
