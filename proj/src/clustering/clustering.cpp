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

#include "hefuzz/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "hefuzz/common.hpp"
#include "hefuzz/kernels.hpp"
#include "hefuzz/prng.hpp"

namespace hefuzz::clustering {

namespace {

double norm2(const std::vector<double>& v) {
  return std::sqrt(kernels::active().dot_f64(v.data(), v.data(), v.size()));
}

double cosine_to(const std::vector<double>& point, double point_norm,
                 const std::vector<double>& centroid, double centroid_norm) {
  if (point_norm == 0.0 || centroid_norm == 0.0) return 0.0;
  double dot =
      kernels::active().dot_f64(point.data(), centroid.data(), point.size());
  return dot / (point_norm * centroid_norm);
}

// k-means++ style: first centroid uniform, the rest proportional to the
// cosine distance (1 - cos) to the closest centroid chosen so far.
std::vector<uint32_t> seed_centroids(
    const std::vector<std::vector<double>>& data,
    const std::vector<double>& norms, uint32_t k, Prng& rng) {
  const size_t n = data.size();
  std::vector<uint32_t> chosen;
  chosen.reserve(k);
  chosen.push_back(uint32_t(rng.next_below(n)));
  std::vector<double> best_dist(n, 2.0);
  while (chosen.size() < k) {
    const auto& last = data[chosen.back()];
    const double last_norm = norms[chosen.back()];
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double d = 1.0 - cosine_to(data[i], norms[i], last, last_norm);
      best_dist[i] = std::min(best_dist[i], std::max(d, 0.0));
      total += best_dist[i];
    }
    uint32_t pick = 0;
    if (total <= 0.0) {
      pick = uint32_t(rng.next_below(n));
    } else {
      double target = rng.next_double() * total;
      double acc = 0.0;
      for (size_t i = 0; i < n; ++i) {
        acc += best_dist[i];
        if (acc >= target) {
          pick = uint32_t(i);
          break;
        }
      }
    }
    chosen.push_back(pick);
  }
  return chosen;
}

}  // namespace

uint32_t default_cluster_count(size_t dataset_size) {
  auto k = uint32_t(std::lround(std::sqrt(double(dataset_size))));
  return std::max<uint32_t>(1, k);
}

uint32_t nearest_centroid(const std::vector<double>& query_std,
                          const std::vector<std::vector<double>>& centroids) {
  if (centroids.empty()) throw TooFewPoints("no centroids");
  double query_norm = norm2(query_std);
  uint32_t best = 0;
  double best_cos = -std::numeric_limits<double>::infinity();
  for (uint32_t c = 0; c < centroids.size(); ++c) {
    if (centroids[c].size() != query_std.size()) {
      throw DimensionMismatch("centroid/query dimension mismatch");
    }
    double cs = cosine_to(query_std, query_norm, centroids[c],
                          norm2(centroids[c]));
    if (cs > best_cos) {
      best_cos = cs;
      best = c;
    }
  }
  return best;
}

ClusterModel cluster(const std::vector<std::vector<double>>& dataset_el200_std,
                     const std::vector<std::vector<double>>& dataset_el50_norm,
                     const ClusterConfig& cfg) {
  const size_t n = dataset_el200_std.size();
  if (n != dataset_el50_norm.size()) {
    throw DimensionMismatch("EL-200 and EL-50 datasets differ in size");
  }
  if (n == 0) throw EmptyDataset("cannot cluster an empty dataset");
  const uint32_t k = cfg.k == 0 ? default_cluster_count(n) : cfg.k;
  if (n < k) throw TooFewPoints("dataset smaller than cluster count");

  const size_t dim = dataset_el200_std.front().size();
  std::vector<double> point_norms(n);
  for (size_t i = 0; i < n; ++i) {
    if (dataset_el200_std[i].size() != dim) {
      throw DimensionMismatch("ragged clustering dataset");
    }
    point_norms[i] = norm2(dataset_el200_std[i]);
  }

  Prng rng(cfg.seed);
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);
  for (uint32_t idx : seed_centroids(dataset_el200_std, point_norms, k, rng)) {
    centroids.push_back(dataset_el200_std[idx]);
  }

  std::vector<uint32_t> labels(n, 0);
  std::vector<double> assigned_cos(n, 0.0);
  std::vector<double> objective_history;

  for (uint32_t iter = 0; iter < cfg.iterations; ++iter) {
    std::vector<double> centroid_norms(k);
    for (uint32_t c = 0; c < k; ++c) centroid_norms[c] = norm2(centroids[c]);

    bool changed = false;
    double objective = 0.0;
    for (size_t i = 0; i < n; ++i) {
      uint32_t best = 0;
      double best_cos = -std::numeric_limits<double>::infinity();
      for (uint32_t c = 0; c < k; ++c) {
        double cs = cosine_to(dataset_el200_std[i], point_norms[i],
                              centroids[c], centroid_norms[c]);
        if (cs > best_cos) {
          best_cos = cs;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
      assigned_cos[i] = best_cos;
      objective += 1.0 - best_cos;
    }
    objective_history.push_back(objective);

    // Mean of assigned standardized vectors. Cosine is scale-free, so the
    // unnormalized mean assigns identically to the spherical-k-means update.
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<uint32_t> counts(k, 0);
    for (size_t i = 0; i < n; ++i) {
      kernels::active().axpy_f64(1.0, dataset_el200_std[i].data(),
                                 sums[labels[i]].data(), dim);
      counts[labels[i]]++;
    }
    for (uint32_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Empty cluster steals the point farthest (lowest cosine) from its
        // current centroid.
        size_t worst = 0;
        double worst_cos = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < n; ++i) {
          if (counts[labels[i]] <= 1) continue;
          if (assigned_cos[i] < worst_cos) {
            worst_cos = assigned_cos[i];
            worst = i;
          }
        }
        counts[labels[worst]]--;
        labels[worst] = c;
        counts[c] = 1;
        centroids[c] = dataset_el200_std[worst];
        changed = true;
        continue;
      }
      double inv = 1.0 / double(counts[c]);
      for (size_t d = 0; d < dim; ++d) centroids[c][d] = sums[c][d] * inv;
    }
    if (!changed && iter > 0) break;
  }

  ClusterModel model;
  model.k_ = k;
  model.centroid_len_ = uint32_t(dim);
  model.match_len_ = uint32_t(dataset_el50_norm.front().size());
  model.centroids_ = std::move(centroids);
  model.objective_history_ = std::move(objective_history);
  model.objective_ = model.objective_history_.empty()
                         ? 0.0
                         : model.objective_history_.back();

  std::vector<std::vector<uint32_t>> rows(k);
  for (size_t i = 0; i < n; ++i) rows[labels[i]].push_back(uint32_t(i));
  uint32_t m = 0;
  for (const auto& row : rows) m = std::max(m, uint32_t(row.size()));
  model.m_ = m;
  model.row_sizes_.resize(k);
  model.assignment_.resize(n);
  model.cells_.assign(size_t(k) * m * model.match_len_, 0.0);
  model.pad_mask_.assign(size_t(k) * m, 1);
  for (uint32_t r = 0; r < k; ++r) {
    model.row_sizes_[r] = uint32_t(rows[r].size());
    for (uint32_t c = 0; c < rows[r].size(); ++c) {
      uint32_t idx = rows[r][c];
      model.assignment_[idx] = CellRef{r, c};
      model.pad_mask_[size_t(r) * m + c] = 0;
      const auto& sig = dataset_el50_norm[idx];
      if (sig.size() != model.match_len_) {
        throw DimensionMismatch("ragged EL-50 dataset");
      }
      std::memcpy(&model.cells_[(size_t(r) * m + c) * model.match_len_],
                  sig.data(), sig.size() * sizeof(double));
    }
  }
  return model;
}

const std::vector<double>& ClusterModel::centroid(uint32_t row) const {
  if (row >= k_) throw IndexOutOfRange("centroid row out of range");
  return centroids_[row];
}

const double* ClusterModel::cell(uint32_t row, uint32_t col) const {
  if (row >= k_ || col >= m_) throw IndexOutOfRange("cell out of range");
  return &cells_[(size_t(row) * m_ + col) * match_len_];
}

bool ClusterModel::is_dummy(uint32_t row, uint32_t col) const {
  if (row >= k_ || col >= m_) throw IndexOutOfRange("cell out of range");
  return pad_mask_[size_t(row) * m_ + col] != 0;
}

std::vector<std::vector<double>> ClusterModel::column(uint32_t j) const {
  if (j >= m_) throw IndexOutOfRange("column index out of range");
  std::vector<std::vector<double>> out(k_);
  for (uint32_t r = 0; r < k_; ++r) {
    const double* c = cell(r, j);
    out[r].assign(c, c + match_len_);
  }
  return out;
}

CoverageCurve ClusterModel::coverage() const {
  CoverageCurve curve;
  curve.cumulative.resize(m_, 0);
  for (uint32_t j = 0; j < m_; ++j) {
    uint64_t in_col = 0;
    for (uint32_t r = 0; r < k_; ++r) {
      if (pad_mask_[size_t(r) * m_ + j] == 0) ++in_col;
    }
    curve.cumulative[j] = (j == 0 ? 0 : curve.cumulative[j - 1]) + in_col;
  }
  return curve;
}

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
    if (size_t(end - p) < n) throw IoError("truncated CLMD model file");
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

}  // namespace

// CLMD layout: header {magic "CLMD", version u16, k u32, M u32, P_match u16,
// P_centroid u16}, centroids row-major f64 LE, cells row-major f64 LE,
// pad_mask bitset, then the setup metadata the responder serves from (scaler
// means/stds and encoding parameters).
void ClusterModel::save(const std::string& path) const {
  std::string b;
  b += "CLMD";
  put_u16(b, 1);
  put_u32(b, k_);
  put_u32(b, m_);
  put_u16(b, uint16_t(match_len_));
  put_u16(b, uint16_t(centroid_len_));
  for (const auto& c : centroids_) {
    for (double v : c) put_f64(b, v);
  }
  for (double v : cells_) put_f64(b, v);
  std::string bits((size_t(k_) * m_ + 7) / 8, '\0');
  for (size_t i = 0; i < pad_mask_.size(); ++i) {
    if (pad_mask_[i]) bits[i / 8] = char(bits[i / 8] | (1 << (i % 8)));
  }
  b += bits;
  put_u32(b, uint32_t(scaler.means.size()));
  for (double v : scaler.means) put_f64(b, v);
  for (double v : scaler.stds) put_f64(b, v);
  put_u32(b, encoding_params.shingle_size);
  put_u32(b, encoding_params.num_permutations);
  put_u32(b, encoding_params.max_hash);
  put_u64(b, encoding_params.seed);
  put_u32(b, uint32_t(assignment_.size()));
  for (const auto& ref : assignment_) {
    put_u32(b, ref.row);
    put_u32(b, ref.col);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(b.data(), std::streamsize(b.size()));
  if (!out) throw IoError("short write: " + path);
}

ClusterModel ClusterModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < 16 || buf.compare(0, 4, "CLMD") != 0) {
    throw IoError("not a CLMD model file: " + path);
  }
  Reader r{reinterpret_cast<const uint8_t*>(buf.data()) + 4,
           reinterpret_cast<const uint8_t*>(buf.data()) + buf.size()};
  if (r.u16() != 1) throw IoError("unsupported CLMD version");
  ClusterModel model;
  model.k_ = r.u32();
  model.m_ = r.u32();
  model.match_len_ = r.u16();
  model.centroid_len_ = r.u16();
  model.centroids_.assign(model.k_, std::vector<double>(model.centroid_len_));
  for (auto& c : model.centroids_) {
    for (double& v : c) v = r.f64();
  }
  model.cells_.resize(size_t(model.k_) * model.m_ * model.match_len_);
  for (double& v : model.cells_) v = r.f64();
  size_t mask_bytes = (size_t(model.k_) * model.m_ + 7) / 8;
  r.need(mask_bytes);
  model.pad_mask_.resize(size_t(model.k_) * model.m_);
  for (size_t i = 0; i < model.pad_mask_.size(); ++i) {
    model.pad_mask_[i] = (r.p[i / 8] >> (i % 8)) & 1;
  }
  r.p += mask_bytes;
  uint32_t dim = r.u32();
  model.scaler.means.resize(dim);
  for (double& v : model.scaler.means) v = r.f64();
  model.scaler.stds.resize(dim);
  for (double& v : model.scaler.stds) v = r.f64();
  model.encoding_params.shingle_size = r.u32();
  model.encoding_params.num_permutations = r.u32();
  model.encoding_params.max_hash = r.u32();
  model.encoding_params.seed = r.u64();
  uint32_t n = r.u32();
  model.assignment_.resize(n);
  for (auto& ref : model.assignment_) {
    ref.row = r.u32();
    ref.col = r.u32();
  }
  model.row_sizes_.assign(model.k_, 0);
  for (size_t i = 0; i < model.pad_mask_.size(); ++i) {
    if (model.pad_mask_[i] == 0) model.row_sizes_[i / model.m_]++;
  }
  return model;
}

}  // namespace hefuzz::clustering
