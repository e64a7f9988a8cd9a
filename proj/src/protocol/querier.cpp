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

#include "hefuzz/common.hpp"
#include "hefuzz/protocol.hpp"

namespace hefuzz::protocol {

using transport::Frame;
using transport::MsgType;

QuerierSession::QuerierSession(const QuerierConfig& cfg,
                               std::vector<std::string> names)
    : cfg_(cfg), names_(std::move(names)) {
  ctx_ = ckks::Context::create(cfg_.he);
  if (names_.empty()) throw BatchTooLarge("query batch is empty");
  if (names_.size() > ctx_->slots()) {
    throw BatchTooLarge("batch exceeds slot capacity " +
                        std::to_string(ctx_->slots()));
  }
  keys_ = ckks::keygen(*ctx_, cfg_.keygen_seed);
}

std::vector<std::vector<uint8_t>> QuerierSession::select_cluster(
    const std::vector<std::vector<double>>& scores, size_t batch) {
  if (scores.empty()) throw DimensionMismatch("no centroid scores");
  const size_t k = scores.size();
  std::vector<std::vector<uint8_t>> indicator(k,
                                              std::vector<uint8_t>(batch, 0));
  for (size_t b = 0; b < batch; ++b) {
    size_t best = 0;
    double best_score = scores[0][b];
    for (size_t c = 1; c < k; ++c) {
      if (scores[c][b] > best_score) {
        best_score = scores[c][b];
        best = c;
      }
    }
    indicator[best][b] = 1;
  }
  return indicator;
}

// Coordinate-major batching: ciphertext i carries coordinate i of every query
// in its slots.
QuerierSession::Prepared QuerierSession::prepare_query() {
  const auto& params = setup_.encoding_params;
  encoding::DualEncoder encoder(params);
  const size_t batch = names_.size();

  std::vector<std::vector<double>> std200(batch);
  std::vector<std::vector<double>> norm50(batch);
  for (size_t b = 0; b < batch; ++b) {
    auto dual = encoder.encode(names_[b]);
    std200[b] = encoding::standardize(encoding::normalize(dual.el200),
                                      setup_.scaler);
    norm50[b] = encoding::normalize(dual.el50);
  }

  Prepared out;
  const uint32_t top = uint32_t(ctx_->top_level());
  std::vector<double> slots(batch);
  for (uint32_t i = 0; i < encoding::kCentroidLength; ++i) {
    for (size_t b = 0; b < batch; ++b) slots[b] = std200[b][i];
    auto pt = ckks::encode(*ctx_, slots, cfg_.he.scale, top);
    out.el200_std.push_back(ckks::encrypt(*ctx_, keys_.pub, pt));
  }
  for (uint32_t i = 0; i < encoding::kMatchLength; ++i) {
    for (size_t b = 0; b < batch; ++b) slots[b] = norm50[b][i];
    auto pt = ckks::encode(*ctx_, slots, cfg_.he.scale, top);
    out.el50_norm.push_back(ckks::encrypt(*ctx_, keys_.pub, pt));
  }
  return out;
}

std::vector<MatchVerdict> QuerierSession::run(transport::Channel& channel) {
  if (phase_ != Phase::Init) {
    throw ProtocolPhaseViolation("querier session already consumed");
  }
  const size_t batch = names_.size();

  // Setup exchange: our HE material out, the responder's encoding/scaler
  // metadata back.
  SetupRequest req;
  req.he_params_text = ckks::serialize_params(cfg_.he);
  req.public_key = ckks::serialize_public_key(*ctx_, keys_.pub);
  req.relin_key = ckks::serialize_relin_key(*ctx_, keys_.relin);
  channel.send({MsgType::Setup, req.to_payload()});
  Frame reply = channel.recv();
  if (reply.type == MsgType::Error) {
    throw ProtocolPhaseViolation("responder error: " + reply.payload);
  }
  if (reply.type != MsgType::Setup) {
    throw ProtocolPhaseViolation("expected Setup reply");
  }
  setup_ = SetupReply::from_payload(reply.payload);
  if (cfg_.expect_tau.has_value() &&
      std::abs(*cfg_.expect_tau - setup_.tau) > 1e-12) {
    throw ProtocolPhaseViolation("threshold disagreement at setup");
  }

  Prepared prepared = prepare_query();
  CiphertextBatch centroid_query;
  for (const auto& ct : prepared.el200_std) {
    centroid_query.blobs.push_back(ckks::serialize_ciphertext(*ctx_, ct));
  }
  channel.send({MsgType::CentroidQuery, centroid_query.to_payload()});
  phase_ = Phase::AwaitCentroidScores;

  Frame scores_frame = channel.recv();
  if (scores_frame.type == MsgType::Error) {
    throw ProtocolPhaseViolation("responder error: " + scores_frame.payload);
  }
  if (scores_frame.type != MsgType::CentroidScores) {
    throw ProtocolPhaseViolation("expected CentroidScores");
  }
  auto score_batch = CiphertextBatch::from_payload(scores_frame.payload);
  if (score_batch.blobs.size() != setup_.clusters) {
    throw ProtocolPhaseViolation("centroid score count mismatch");
  }
  std::vector<std::vector<double>> scores;
  scores.reserve(score_batch.blobs.size());
  for (const auto& blob : score_batch.blobs) {
    auto ct = ckks::deserialize_ciphertext(*ctx_, blob);
    scores.push_back(ckks::decrypt_values(*ctx_, keys_.secret, ct, batch));
  }

  auto indicator = select_cluster(scores, batch);
  CiphertextBatch column_query;
  const uint32_t top = uint32_t(ctx_->top_level());
  std::vector<double> slots(batch);
  for (const auto& row_bits : indicator) {
    for (size_t b = 0; b < batch; ++b) slots[b] = double(row_bits[b]);
    auto pt = ckks::encode(*ctx_, slots, cfg_.he.scale, top);
    auto ct = ckks::encrypt(*ctx_, keys_.pub, pt);
    column_query.blobs.push_back(ckks::serialize_ciphertext(*ctx_, ct));
  }
  for (const auto& ct : prepared.el50_norm) {
    column_query.blobs.push_back(ckks::serialize_ciphertext(*ctx_, ct));
  }
  channel.send({MsgType::ColumnQuery, column_query.to_payload()});
  phase_ = Phase::AwaitColumnScores;

  std::vector<MatchVerdict> verdicts(batch);
  for (size_t b = 0; b < batch; ++b) verdicts[b].query_id = uint32_t(b);
  size_t unmatched = batch;
  bool sent_done = false;
  uint32_t columns_seen = 0;

  for (;;) {
    Frame frame = channel.recv();
    if (frame.type == MsgType::Done) break;
    if (frame.type == MsgType::Error) {
      throw ProtocolPhaseViolation("responder error: " + frame.payload);
    }
    if (frame.type != MsgType::ColumnScore) {
      throw ProtocolPhaseViolation("expected ColumnScore");
    }
    auto msg = ColumnScoreMsg::from_payload(frame.payload);
    columns_seen = std::max(columns_seen, msg.column + 1);
    if (sent_done) continue;  // draining after early exit
    auto ct = ckks::deserialize_ciphertext(*ctx_, msg.blob);
    auto values = ckks::decrypt_values(*ctx_, keys_.secret, ct, batch);
    for (size_t b = 0; b < batch; ++b) {
      if (verdicts[b].matched) continue;
      if (values[b] > 0.0) {
        verdicts[b].matched = true;
        verdicts[b].columns_consumed = msg.column + 1;
        --unmatched;
      }
    }
    if (cfg_.early_exit && unmatched == 0 && !sent_done) {
      channel.send({MsgType::Done, {}});
      sent_done = true;
    }
  }
  if (!sent_done) channel.send({MsgType::Done, {}});
  for (auto& v : verdicts) {
    if (!v.matched) v.columns_consumed = columns_seen;
  }
  phase_ = Phase::Done;
  return verdicts;
}

}  // namespace hefuzz::protocol
