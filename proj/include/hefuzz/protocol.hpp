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

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hefuzz/ckks/engine.hpp"
#include "hefuzz/ckks/serialize.hpp"
#include "hefuzz/clustering.hpp"
#include "hefuzz/encoding.hpp"
#include "hefuzz/transport.hpp"

namespace hefuzz::protocol {

// Chain with three rescale primes: the protocol circuit is three
// multiplications deep (selection, similarity, masking), one more than the
// published [60,40,40,60] chain supports.
ckks::HeParams default_protocol_params();

struct MatchVerdict {
  uint32_t query_id = 0;
  bool matched = false;
  uint32_t columns_consumed = 0;
};

// ---- wire messages ---------------------------------------------------------

struct SetupRequest {
  std::string he_params_text;
  std::string public_key;
  std::string relin_key;
  bool probe = false;  // empty payload: health probe, answered with the reply

  std::string to_payload() const;
  static SetupRequest from_payload(std::string_view payload);
};

struct SetupReply {
  encoding::EncodingParams encoding_params;
  encoding::ScalerParams scaler;
  double tau = 0.9;
  uint32_t clusters = 0;
  uint32_t columns = 0;
  std::string he_params_text;

  std::string to_payload() const;
  static SetupReply from_payload(std::string_view payload);
};

struct CiphertextBatch {
  std::vector<std::string> blobs;

  std::string to_payload() const;
  static CiphertextBatch from_payload(std::string_view payload);
};

struct ColumnScoreMsg {
  uint32_t column = 0;
  std::string blob;

  std::string to_payload() const;
  static ColumnScoreMsg from_payload(std::string_view payload);
};

// ---- querier ---------------------------------------------------------------

struct QuerierConfig {
  ckks::HeParams he = default_protocol_params();
  uint64_t keygen_seed = 1;
  bool early_exit = true;
  // When set, overrides the responder's advertised threshold must match;
  // mismatch is a protocol violation.
  std::optional<double> expect_tau;
};

// State machine for party A. Drives setup, centroid selection and verdicts.
// The secret key never leaves this object; no outbound message contains it.
class QuerierSession {
 public:
  enum class Phase { Init, AwaitCentroidScores, AwaitColumnScores, Done };

  QuerierSession(const QuerierConfig& cfg, std::vector<std::string> names);

  // Runs the full protocol over the channel and returns one verdict per name.
  std::vector<MatchVerdict> run(transport::Channel& channel);

  Phase phase() const { return phase_; }
  const SetupReply& setup() const { return setup_; }

  // Batched one-hot selection per query slot: argmax per slot, ties to the
  // lowest index. scores[c][b] is centroid c's decrypted score for query b.
  static std::vector<std::vector<uint8_t>> select_cluster(
      const std::vector<std::vector<double>>& scores, size_t batch);

 private:
  struct Prepared {
    std::vector<ckks::Ciphertext> el200_std;  // 200 coordinate ciphertexts
    std::vector<ckks::Ciphertext> el50_norm;  // 50 coordinate ciphertexts
  };
  Prepared prepare_query();

  QuerierConfig cfg_;
  std::vector<std::string> names_;
  ckks::ContextPtr ctx_;
  ckks::KeySet keys_;
  SetupReply setup_;
  Phase phase_ = Phase::Init;
};

// ---- responder ---------------------------------------------------------------

struct ResponderConfig {
  clustering::ClusterModel model;
  double tau = 0.9;
  int threads = 1;
  // Mask PRNG seed; 0 draws a fresh nondeterministic seed per session.
  uint64_t mask_seed = 0;
};

// State machine for party B. Holds no secret key and never decrypts; columns
// are evaluated under the querier's public material only.
class ResponderSession {
 public:
  enum class Phase { Idle, ServedCentroids, StreamingColumns };

  explicit ResponderSession(const ResponderConfig& cfg);

  // Serves exactly one querier session over the channel.
  void serve(transport::Channel& channel);

  Phase phase() const { return phase_; }

 private:
  const ResponderConfig& cfg_;
  ckks::ContextPtr ctx_;
  ckks::PublicKey pk_;
  ckks::RelinKey rlk_;
  Phase phase_ = Phase::Idle;
};

// Selection dot for one column: coordinate i of the result is
// sum_row indicator[row] * column[row][i]; the encrypted row choice picks one
// cell per slot. Shared by the responder path and the step-6 test hook.
std::vector<ckks::Ciphertext> select_column_cells(
    const ckks::Context& ctx, const clustering::ClusterModel& model,
    std::span<const ckks::Ciphertext> indicator, uint32_t column);

// Full column evaluation: selection, ct-ct cosine, then (score - tau) * r
// with r fresh per slot from mask_rng.
ckks::Ciphertext column_score(const ckks::Context& ctx,
                              const clustering::ClusterModel& model,
                              std::span<const ckks::Ciphertext> indicator,
                              std::span<const ckks::Ciphertext> query_el50,
                              uint32_t column, double tau,
                              const ckks::RelinKey& rlk, Prng& mask_rng);

// ---- orchestration -----------------------------------------------------------

struct ProtocolResult {
  std::vector<MatchVerdict> verdicts;
  transport::TranscriptLog querier_transcript;
  transport::TranscriptLog responder_transcript;
};

// Runs querier and responder over an in-process channel pair.
ProtocolResult run_protocol(const QuerierConfig& querier_cfg,
                            const ResponderConfig& responder_cfg,
                            const std::vector<std::string>& names);

}  // namespace hefuzz::protocol
