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

#include "hefuzz/encoding.hpp"

namespace hefuzz::clustering {

struct ClusterConfig {
  uint32_t k = 0;  // 0 = round(sqrt(|dataset|))
  uint32_t iterations = 20;
  uint64_t seed = 0;
};

struct CellRef {
  uint32_t row = 0;
  uint32_t col = 0;
};

struct CoverageCurve {
  std::vector<uint64_t> cumulative;  // real names in columns [0..j]
};

// Offline product of the responder's k-means pass: centroids in standardized
// EL-200 space plus the padded k x M matrix of unit-norm EL-50 signatures.
// Dummy cells are all-zero so their cosine against anything is exactly 0.
class ClusterModel {
 public:
  ClusterModel() = default;

  uint32_t k() const { return k_; }
  uint32_t columns() const { return m_; }
  uint32_t match_length() const { return match_len_; }
  uint32_t centroid_length() const { return centroid_len_; }

  const std::vector<double>& centroid(uint32_t row) const;
  // Cell (row, col) as a match-length vector; zeros when the cell is a dummy.
  const double* cell(uint32_t row, uint32_t col) const;
  bool is_dummy(uint32_t row, uint32_t col) const;

  // The j-th cell of every row, dummies included.
  std::vector<std::vector<double>> column(uint32_t j) const;

  CoverageCurve coverage() const;

  const std::vector<CellRef>& assignment() const { return assignment_; }
  uint64_t real_count() const { return assignment_.size(); }
  // Real (non-dummy) cells in a row.
  uint32_t row_size(uint32_t row) const { return row_sizes_[row]; }

  // Final k-means objective, sum of (1 - cosine) to the assigned centroid.
  double objective() const { return objective_; }
  const std::vector<double>& objective_history() const {
    return objective_history_;
  }

  void save(const std::string& path) const;
  static ClusterModel load(const std::string& path);

  // Responder-side setup material carried inside the model file.
  encoding::ScalerParams scaler;
  encoding::EncodingParams encoding_params;

 private:
  friend ClusterModel cluster(const std::vector<std::vector<double>>&,
                              const std::vector<std::vector<double>>&,
                              const ClusterConfig&);

  uint32_t k_ = 0;
  uint32_t m_ = 0;
  uint32_t match_len_ = encoding::kMatchLength;
  uint32_t centroid_len_ = encoding::kCentroidLength;
  std::vector<std::vector<double>> centroids_;  // k x centroid_len
  std::vector<double> cells_;                   // k * M * match_len, row-major
  std::vector<uint8_t> pad_mask_;               // k * M, 1 = dummy
  std::vector<uint32_t> row_sizes_;
  std::vector<CellRef> assignment_;  // dataset index -> (row, col)
  double objective_ = 0.0;
  std::vector<double> objective_history_;
};

// Lloyd iterations with cosine-similarity assignment and mean centroid
// update; k-means++ style seeding from cfg.seed; empty clusters steal the
// point farthest from its centroid. Stops on cfg.iterations or unchanged
// assignments. Throws TooFewPoints when |dataset| < k.
ClusterModel cluster(const std::vector<std::vector<double>>& dataset_el200_std,
                     const std::vector<std::vector<double>>& dataset_el50_norm,
                     const ClusterConfig& cfg);

// argmax of cosine similarity, ties to the lowest index.
uint32_t nearest_centroid(const std::vector<double>& query_std,
                          const std::vector<std::vector<double>>& centroids);

uint32_t default_cluster_count(size_t dataset_size);

}  // namespace hefuzz::clustering
