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

#include <cstring>

#include "hefuzz/common.hpp"
#include "hefuzz/protocol.hpp"

namespace hefuzz::protocol {

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
void put_blob(std::string& b, std::string_view blob) {
  put_u32(b, uint32_t(blob.size()));
  b.append(blob);
}

struct Reader {
  const uint8_t* p;
  const uint8_t* end;
  void need(size_t n) const {
    if (size_t(end - p) < n) throw FrameCorrupt("truncated protocol message");
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
  std::string blob() {
    uint32_t len = u32();
    need(len);
    std::string out(reinterpret_cast<const char*>(p), len);
    p += len;
    return out;
  }
};

Reader reader(std::string_view payload) {
  return Reader{reinterpret_cast<const uint8_t*>(payload.data()),
                reinterpret_cast<const uint8_t*>(payload.data()) +
                    payload.size()};
}

}  // namespace

ckks::HeParams default_protocol_params() {
  ckks::HeParams p;
  p.modulus_bits = {60, 40, 40, 40, 60};
  return p;
}

std::string SetupRequest::to_payload() const {
  if (probe) return {};
  std::string b;
  put_blob(b, he_params_text);
  put_blob(b, public_key);
  put_blob(b, relin_key);
  return b;
}

SetupRequest SetupRequest::from_payload(std::string_view payload) {
  SetupRequest req;
  if (payload.empty()) {
    req.probe = true;
    return req;
  }
  Reader r = reader(payload);
  req.he_params_text = r.blob();
  req.public_key = r.blob();
  req.relin_key = r.blob();
  return req;
}

std::string SetupReply::to_payload() const {
  std::string b;
  put_u32(b, encoding_params.shingle_size);
  put_u32(b, encoding_params.num_permutations);
  put_u32(b, encoding_params.max_hash);
  put_u64(b, encoding_params.seed);
  put_u32(b, uint32_t(scaler.means.size()));
  for (double v : scaler.means) put_f64(b, v);
  for (double v : scaler.stds) put_f64(b, v);
  put_f64(b, tau);
  put_u32(b, clusters);
  put_u32(b, columns);
  put_blob(b, he_params_text);
  return b;
}

SetupReply SetupReply::from_payload(std::string_view payload) {
  Reader r = reader(payload);
  SetupReply reply;
  reply.encoding_params.shingle_size = r.u32();
  reply.encoding_params.num_permutations = r.u32();
  reply.encoding_params.max_hash = r.u32();
  reply.encoding_params.seed = r.u64();
  uint32_t dim = r.u32();
  reply.scaler.means.resize(dim);
  for (double& v : reply.scaler.means) v = r.f64();
  reply.scaler.stds.resize(dim);
  for (double& v : reply.scaler.stds) v = r.f64();
  reply.tau = r.f64();
  reply.clusters = r.u32();
  reply.columns = r.u32();
  reply.he_params_text = r.blob();
  return reply;
}

std::string CiphertextBatch::to_payload() const {
  std::string b;
  put_u16(b, uint16_t(blobs.size()));
  for (const auto& blob : blobs) put_blob(b, blob);
  return b;
}

CiphertextBatch CiphertextBatch::from_payload(std::string_view payload) {
  Reader r = reader(payload);
  CiphertextBatch batch;
  uint16_t count = r.u16();
  batch.blobs.reserve(count);
  for (uint16_t i = 0; i < count; ++i) batch.blobs.push_back(r.blob());
  return batch;
}

std::string ColumnScoreMsg::to_payload() const {
  std::string b;
  put_u16(b, 1);
  put_u32(b, column);
  put_blob(b, blob);
  return b;
}

ColumnScoreMsg ColumnScoreMsg::from_payload(std::string_view payload) {
  Reader r = reader(payload);
  if (r.u16() != 1) throw FrameCorrupt("column score count must be 1");
  ColumnScoreMsg msg;
  msg.column = r.u32();
  msg.blob = r.blob();
  return msg;
}

}  // namespace hefuzz::protocol
