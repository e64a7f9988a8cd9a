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
#include <vector>

#include "hefuzz/clustering.hpp"
#include "hefuzz/encoding.hpp"
#include "hefuzz/prng.hpp"

namespace hefuzz::eval {

// ---- name pools -------------------------------------------------------------

struct NamePool {
  std::vector<std::string> given;
  std::vector<std::string> family;

  // Loads the shipped pools from dir (given_names.txt / family_names.txt).
  static NamePool load(const std::string& dir);
  static NamePool load_default();
};

// ---- synthetic datasets -------------------------------------------------------

struct DatasetSpec {
  size_t n_names = 1000;
  uint64_t seed = 1;
  // LD levels assigned to positive queries round-robin.
  std::vector<int> positive_lds = {0, 1, 2};
  size_t positives = 100;
  size_t negatives = 100;
  // Negatives are re-drawn while their best match-space cosine reaches this
  // threshold; the share of survivors is checked at generation.
  double negative_cos_limit = 0.9;
  // Full-record shape: voter-roll style names carry middle names and often
  // hyphenated family names; short 2-part names shift the whole
  // similarity-vs-edit-distance curve left.
  double middle_name_prob = 1.0;
  double second_middle_prob = 0.0;
  double double_family_prob = 0.5;
  // Share of negatives drawn as near-misses (a responder record with one
  // name part swapped) instead of fresh unrelated pairs.
  double hard_negative_share = 0.0;
  encoding::EncodingParams encoding;
};

struct QueryCase {
  std::string name;
  bool is_member = false;
  uint32_t source_id = 0;  // responder index for positives
  int ld = 0;
};

struct Dataset {
  std::vector<std::string> responder;
  std::vector<QueryCase> queries;
};

// One name in the spec's record style (middle / double-family shape).
std::string draw_name(const NamePool& pool, const DatasetSpec& spec,
                      Prng& rng);

// Exact edit distance (textbook dynamic program).
size_t levenshtein(std::string_view a, std::string_view b);

// Random edits until the result sits at exactly `ld` from the source.
std::string perturb_to_ld(const std::string& name, int ld, Prng& rng);

Dataset generate_dataset(const NamePool& pool, const DatasetSpec& spec);

// ---- metrics -------------------------------------------------------------------

struct MetricsReport {
  uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0;
  double precision = 0.0;  // 0 when undefined
  double recall = 0.0;
  double f1 = 0.0;
};

MetricsReport evaluate(const std::vector<bool>& verdicts,
                       const std::vector<bool>& truth);

// ---- plaintext reference matcher -------------------------------------------------

// Mirrors the protocol pipeline exactly, in the clear: same signatures, same
// clustering, raw-dot centroid selection, exact cosine against the chosen
// row, threshold verdict. The oracle for end-to-end equivalence tests and the
// engine behind desk-scale accuracy sweeps.
class ReferenceMatcher {
 public:
  struct Result {
    bool matched = false;
    uint32_t columns_consumed = 0;
    double best_cos = -1.0;  // max match-space cosine among scanned cells
  };

  // clusters == 0 selects linear (exhaustive) mode.
  ReferenceMatcher(const std::vector<std::string>& responder_names,
                   const encoding::EncodingParams& params, uint32_t clusters,
                   uint32_t iterations, uint64_t seed);

  Result match(const std::string& query, double tau,
               bool early_exit = false) const;
  std::vector<bool> verdicts(const std::vector<QueryCase>& queries,
                             double tau) const;

  bool linear() const { return linear_; }
  const clustering::ClusterModel& model() const { return model_; }
  const encoding::ScalerParams& scaler() const { return scaler_; }

  // The same model object the HE responder would serve from.
  clustering::ClusterModel release_model() { return std::move(model_); }

 private:
  encoding::EncodingParams params_;
  encoding::ScalerParams scaler_;
  bool linear_ = false;
  std::vector<std::vector<double>> el50_norm_;  // linear mode store
  clustering::ClusterModel model_;
};

// ---- sweeps ----------------------------------------------------------------------

struct SweepPoint {
  double param = 0.0;
  MetricsReport metrics;
};

std::vector<SweepPoint> sweep_threshold(const ReferenceMatcher& matcher,
                                        const std::vector<QueryCase>& queries,
                                        const std::vector<double>& taus);

struct ClusterSweepPoint {
  uint32_t clusters = 0;
  uint32_t columns = 0;  // 0 in linear mode
  MetricsReport metrics;
  std::vector<uint64_t> coverage;
};

std::vector<ClusterSweepPoint> sweep_clusters(
    const Dataset& dataset, const encoding::EncodingParams& params,
    const std::vector<uint32_t>& cluster_counts, uint32_t iterations,
    uint64_t seed, double tau);

struct LdSweepPoint {
  int ld = 0;
  MetricsReport metrics;
};

std::vector<LdSweepPoint> sweep_ld(const NamePool& pool,
                                   const encoding::EncodingParams& params,
                                   size_t n_names, size_t queries_per_level,
                                   uint64_t seed, double tau,
                                   uint32_t clusters, uint32_t iterations);

std::string metrics_csv(const std::vector<SweepPoint>& rows,
                        const std::string& param_name);
std::string coverage_csv(const std::vector<uint64_t>& cumulative);

}  // namespace hefuzz::eval
