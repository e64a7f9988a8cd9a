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

#include <future>

#include "hefuzz/common.hpp"
#include "hefuzz/protocol.hpp"

namespace hefuzz::protocol {

using transport::Frame;
using transport::MsgType;

std::vector<ckks::Ciphertext> select_column_cells(
    const ckks::Context& ctx, const clustering::ClusterModel& model,
    std::span<const ckks::Ciphertext> indicator, uint32_t column) {
  if (column >= model.columns()) throw IndexOutOfRange("column out of range");
  if (indicator.size() != model.k()) {
    throw DimensionMismatch("indicator length != cluster count");
  }
  std::vector<ckks::Ciphertext> selected;
  selected.reserve(model.match_length());
  std::vector<double> plains(model.k());
  for (uint32_t i = 0; i < model.match_length(); ++i) {
    for (uint32_t row = 0; row < model.k(); ++row) {
      plains[row] = model.cell(row, column)[i];
    }
    selected.push_back(ckks::dot_ct_pt(ctx, indicator, plains));
  }
  return selected;
}

ckks::Ciphertext column_score(const ckks::Context& ctx,
                              const clustering::ClusterModel& model,
                              std::span<const ckks::Ciphertext> indicator,
                              std::span<const ckks::Ciphertext> query_el50,
                              uint32_t column, double tau,
                              const ckks::RelinKey& rlk, Prng& mask_rng) {
  auto selected = select_column_cells(ctx, model, indicator, column);

  // Explicit level alignment before the ciphertext-ciphertext dot.
  std::vector<ckks::Ciphertext> aligned;
  std::span<const ckks::Ciphertext> query_view = query_el50;
  if (!query_el50.empty() && query_el50[0].level != selected[0].level) {
    aligned.reserve(query_el50.size());
    for (const auto& ct : query_el50) {
      aligned.push_back(ckks::drop_to_level(ctx, ct, selected[0].level));
    }
    query_view = aligned;
  }
  ckks::Ciphertext score = ckks::dot_ct_ct(ctx, selected, query_view, rlk);

  // (score - tau) * r with a fresh mask per slot; only the sign survives.
  ckks::Ciphertext shifted = ckks::add_plain(ctx, score, -tau);
  std::vector<double> masks(ctx.slots());
  for (double& m : masks) m = mask_rng.next_in(1.0, 100.0);
  auto mask_pt = ckks::encode(ctx, masks, ctx.params().scale, shifted.level);
  ckks::Ciphertext masked = ckks::mul_plain(ctx, shifted, mask_pt);
  masked.slot_tag = 1;  // batched per-query scores
  return masked;
}

ResponderSession::ResponderSession(const ResponderConfig& cfg) : cfg_(cfg) {
  if (cfg_.model.k() == 0) throw ModelMissing("responder has no cluster model");
}

void ResponderSession::serve(transport::Channel& channel) {
  const clustering::ClusterModel& model = cfg_.model;

  auto reply_setup = [&] {
    SetupReply reply;
    reply.encoding_params = model.encoding_params;
    reply.scaler = model.scaler;
    reply.tau = cfg_.tau;
    reply.clusters = model.k();
    reply.columns = model.columns();
    reply.he_params_text = ctx_ ? ckks::serialize_params(ctx_->params()) : "";
    channel.send({MsgType::Setup, reply.to_payload()});
  };

  try {
    // Setup phase; health probes are answered without leaving Idle.
    for (;;) {
      Frame frame = channel.recv();
      if (frame.type != MsgType::Setup) {
        throw ProtocolPhaseViolation("expected Setup first");
      }
      auto req = SetupRequest::from_payload(frame.payload);
      if (req.probe) {
        reply_setup();
        continue;
      }
      ctx_ = ckks::Context::create(ckks::deserialize_params(req.he_params_text));
      pk_ = ckks::deserialize_public_key(*ctx_, req.public_key);
      rlk_ = ckks::deserialize_relin_key(*ctx_, req.relin_key);
      reply_setup();
      break;
    }

    Frame frame = channel.recv();
    if (frame.type != MsgType::CentroidQuery) {
      throw ProtocolPhaseViolation("expected CentroidQuery");
    }
    auto batch = CiphertextBatch::from_payload(frame.payload);
    if (batch.blobs.size() != model.centroid_length()) {
      throw ProtocolPhaseViolation("centroid query must carry one ciphertext "
                                   "per EL-200 coordinate");
    }
    std::vector<ckks::Ciphertext> query_std;
    query_std.reserve(batch.blobs.size());
    for (const auto& blob : batch.blobs) {
      query_std.push_back(ckks::deserialize_ciphertext(*ctx_, blob));
    }

    // Step 3: unmasked similarity scores with every centroid.
    CiphertextBatch scores;
    for (uint32_t c = 0; c < model.k(); ++c) {
      auto ct = ckks::dot_ct_pt(*ctx_, query_std, model.centroid(c));
      scores.blobs.push_back(ckks::serialize_ciphertext(*ctx_, ct));
    }
    channel.send({MsgType::CentroidScores, scores.to_payload()});
    phase_ = Phase::ServedCentroids;

    frame = channel.recv();
    if (frame.type != MsgType::ColumnQuery) {
      throw ProtocolPhaseViolation("expected ColumnQuery");
    }
    auto column_query = CiphertextBatch::from_payload(frame.payload);
    if (column_query.blobs.size() != model.k() + model.match_length()) {
      throw ProtocolPhaseViolation("column query must carry k + match-length "
                                   "ciphertexts");
    }
    std::vector<ckks::Ciphertext> indicator;
    std::vector<ckks::Ciphertext> query_el50;
    for (size_t i = 0; i < column_query.blobs.size(); ++i) {
      auto ct = ckks::deserialize_ciphertext(*ctx_, column_query.blobs[i]);
      if (i < model.k()) {
        indicator.push_back(std::move(ct));
      } else {
        query_el50.push_back(std::move(ct));
      }
    }
    // Align the match query once; selection consumes one level.
    std::vector<ckks::Ciphertext> query_aligned;
    query_aligned.reserve(query_el50.size());
    for (const auto& ct : query_el50) {
      query_aligned.push_back(
          ckks::drop_to_level(*ctx_, ct, indicator[0].level - 1));
    }
    phase_ = Phase::StreamingColumns;

    Prng mask_rng = cfg_.mask_seed == 0 ? Prng::nondeterministic()
                                        : Prng(cfg_.mask_seed);
    const uint32_t columns = model.columns();
    const int threads = std::max(1, cfg_.threads);
    bool got_done = false;
    for (uint32_t j = 0; j < columns && !got_done;) {
      uint32_t chunk = std::min<uint32_t>(uint32_t(threads), columns - j);
      // Columns are independent; masks are drawn up-front so the stream is
      // identical whether or not workers run in parallel.
      std::vector<Prng> rngs;
      for (uint32_t c = 0; c < chunk; ++c) rngs.emplace_back(mask_rng.next_u64());
      std::vector<std::future<ckks::Ciphertext>> futures;
      for (uint32_t c = 1; c < chunk; ++c) {
        futures.push_back(std::async(std::launch::async, [&, c] {
          return column_score(*ctx_, model, indicator, query_aligned, j + c,
                              cfg_.tau, rlk_, rngs[c]);
        }));
      }
      ckks::Ciphertext first = column_score(*ctx_, model, indicator,
                                            query_aligned, j, cfg_.tau, rlk_,
                                            rngs[0]);
      std::vector<ckks::Ciphertext> results;
      results.push_back(std::move(first));
      for (auto& f : futures) results.push_back(f.get());
      for (uint32_t c = 0; c < chunk; ++c) {
        ColumnScoreMsg msg;
        msg.column = j + c;
        msg.blob = ckks::serialize_ciphertext(*ctx_, results[c]);
        channel.send({MsgType::ColumnScore, msg.to_payload()});
      }
      j += chunk;
      while (auto early = channel.try_recv()) {
        if (early->type == MsgType::Done) {
          got_done = true;
          break;
        }
        throw ProtocolPhaseViolation("unexpected frame while streaming");
      }
    }
    channel.send({MsgType::Done, {}});
    while (!got_done) {
      Frame f = channel.recv();
      if (f.type == MsgType::Done) got_done = true;
    }
    phase_ = Phase::Idle;
  } catch (const Error& e) {
    try {
      channel.send({MsgType::Error, e.what()});
    } catch (...) {
      // channel already dead; nothing else to report
    }
    throw;
  }
}

}  // namespace hefuzz::protocol
