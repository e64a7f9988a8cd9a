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

#include "hefuzz/common.hpp"
#include "hefuzz/eval.hpp"
#include "hefuzz/kernels.hpp"

namespace hefuzz::eval {

ReferenceMatcher::ReferenceMatcher(
    const std::vector<std::string>& responder_names,
    const encoding::EncodingParams& params, uint32_t clusters,
    uint32_t iterations, uint64_t seed)
    : params_(params), linear_(clusters == 0) {
  if (responder_names.empty()) throw EmptyDataset("no responder names");
  encoding::DualEncoder encoder(params);
  std::vector<std::vector<double>> el200_norm;
  el200_norm.reserve(responder_names.size());
  el50_norm_.reserve(responder_names.size());
  for (const auto& name : responder_names) {
    auto dual = encoder.encode(name);
    el200_norm.push_back(encoding::normalize(dual.el200));
    el50_norm_.push_back(encoding::normalize(dual.el50));
  }
  scaler_ = encoding::fit_scaler(el200_norm);
  if (linear_) return;

  std::vector<std::vector<double>> el200_std;
  el200_std.reserve(el200_norm.size());
  for (const auto& v : el200_norm) {
    el200_std.push_back(encoding::standardize(v, scaler_));
  }
  clustering::ClusterConfig cfg;
  cfg.k = clusters;
  cfg.iterations = iterations;
  cfg.seed = seed;
  model_ = clustering::cluster(el200_std, el50_norm_, cfg);
  model_.scaler = scaler_;
  model_.encoding_params = params;
  el50_norm_.clear();  // the padded matrix owns the match-space vectors now
}

ReferenceMatcher::Result ReferenceMatcher::match(const std::string& query,
                                                 double tau,
                                                 bool early_exit) const {
  encoding::DualEncoder encoder(params_);
  auto dual = encoder.encode(query);
  auto norm50 = encoding::normalize(dual.el50);
  const auto& k = kernels::active();

  Result result;
  if (linear_) {
    uint32_t scanned = 0;
    for (const auto& ref : el50_norm_) {
      ++scanned;
      double cos = k.dot_f64(norm50.data(), ref.data(), norm50.size());
      result.best_cos = std::max(result.best_cos, cos);
      if (cos > tau) {
        result.matched = true;
        if (early_exit) break;
      }
    }
    result.columns_consumed = scanned;
    return result;
  }

  // Centroid phase mirrors the protocol: raw dot products of the
  // standardized query against the centroids, argmax with low-index ties.
  auto std200 = encoding::standardize(encoding::normalize(dual.el200), scaler_);
  uint32_t row = 0;
  double best_dot = -std::numeric_limits<double>::infinity();
  for (uint32_t c = 0; c < model_.k(); ++c) {
    const auto& centroid = model_.centroid(c);
    double dot = k.dot_f64(std200.data(), centroid.data(), std200.size());
    if (dot > best_dot) {
      best_dot = dot;
      row = c;
    }
  }

  uint32_t scanned = 0;
  for (uint32_t j = 0; j < model_.columns(); ++j) {
    ++scanned;
    const double* cell = model_.cell(row, j);
    double cos = k.dot_f64(norm50.data(), cell, norm50.size());
    result.best_cos = std::max(result.best_cos, cos);
    if (cos > tau) {
      result.matched = true;
      if (early_exit) break;
    }
  }
  result.columns_consumed = scanned;
  return result;
}

std::vector<bool> ReferenceMatcher::verdicts(
    const std::vector<QueryCase>& queries, double tau) const {
  std::vector<bool> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(match(q.name, tau).matched);
  return out;
}

}  // namespace hefuzz::eval
