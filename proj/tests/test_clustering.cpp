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
#include <cstdio>
#include <map>

#include "doctest.h"
#include "hefuzz/clustering.hpp"
#include "hefuzz/common.hpp"
#include "hefuzz/kernels.hpp"
#include "hefuzz/prng.hpp"

using namespace hefuzz;
using namespace hefuzz::clustering;

namespace {

// Two well-separated direction blobs in dim dimensions.
struct Blobs {
  std::vector<std::vector<double>> points;
  std::vector<int> labels;
};

Blobs make_blobs(size_t per_blob, size_t dim, uint64_t seed) {
  Prng rng(seed);
  Blobs out;
  std::vector<std::vector<double>> centers(2, std::vector<double>(dim, 0.0));
  for (size_t d = 0; d < dim; ++d) {
    centers[0][d] = d < dim / 2 ? 1.0 : 0.05;
    centers[1][d] = d < dim / 2 ? 0.05 : 1.0;
  }
  for (int blob = 0; blob < 2; ++blob) {
    for (size_t i = 0; i < per_blob; ++i) {
      std::vector<double> p(dim);
      for (size_t d = 0; d < dim; ++d) {
        p[d] = centers[size_t(blob)][d] + rng.next_gaussian(0.05);
      }
      out.points.push_back(std::move(p));
      out.labels.push_back(blob);
    }
  }
  return out;
}

std::vector<std::vector<double>> unit_rows(
    const std::vector<std::vector<double>>& rows) {
  std::vector<std::vector<double>> out;
  for (const auto& row : rows) {
    double nrm = std::sqrt(
        kernels::active().dot_f64(row.data(), row.data(), row.size()));
    std::vector<double> u(row.size());
    for (size_t i = 0; i < row.size(); ++i) u[i] = row[i] / nrm;
    out.push_back(std::move(u));
  }
  return out;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  const auto& k = kernels::active();
  double num = k.dot_f64(a.data(), b.data(), a.size());
  double na = std::sqrt(k.dot_f64(a.data(), a.data(), a.size()));
  double nb = std::sqrt(k.dot_f64(b.data(), b.data(), b.size()));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return num / (na * nb);
}

}  // namespace

TEST_CASE("k=1 puts everything in one row") {
  auto blobs = make_blobs(10, 8, 1);
  auto match = unit_rows(blobs.points);
  ClusterConfig cfg{1, 20, 3};
  auto model = cluster(blobs.points, match, cfg);
  CHECK(model.k() == 1);
  CHECK(model.columns() == 20);
  CHECK(model.row_size(0) == 20);
  // centroid = mean vector
  std::vector<double> mean(8, 0.0);
  for (const auto& p : blobs.points) {
    for (size_t d = 0; d < 8; ++d) mean[d] += p[d];
  }
  for (auto& v : mean) v /= double(blobs.points.size());
  for (size_t d = 0; d < 8; ++d) {
    CHECK(model.centroid(0)[d] == doctest::Approx(mean[d]));
  }
  // coverage is 1,2,...,n
  auto cov = model.coverage();
  for (size_t j = 0; j < cov.cumulative.size(); ++j) {
    CHECK(cov.cumulative[j] == j + 1);
  }
}

TEST_CASE("two blobs: assignments agree with brute-force nearest centroid") {
  auto blobs = make_blobs(60, 16, 7);
  auto match = unit_rows(blobs.points);
  ClusterConfig cfg{2, 20, 5};
  auto model = cluster(blobs.points, match, cfg);

  size_t agree = 0;
  for (size_t i = 0; i < blobs.points.size(); ++i) {
    // brute-force oracle: best centroid by cosine scan
    uint32_t best = 0;
    double best_cos = -2.0;
    for (uint32_t c = 0; c < model.k(); ++c) {
      double cs = cosine(blobs.points[i], model.centroid(c));
      if (cs > best_cos) {
        best_cos = cs;
        best = c;
      }
    }
    if (model.assignment()[i].row == best) ++agree;
  }
  CHECK(double(agree) / double(blobs.points.size()) >= 0.95);
}

TEST_CASE("nearest_centroid: ties break to the lowest index") {
  std::vector<std::vector<double>> centroids{
      {1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  CHECK(nearest_centroid({2.0, 0.0}, centroids) == 0);
  CHECK(nearest_centroid({0.0, 3.0}, centroids) == 2);
  CHECK_THROWS_AS(nearest_centroid({1.0, 0.0, 0.0}, centroids),
                  DimensionMismatch);

  // random queries agree with an exhaustive scan
  Prng rng(9);
  std::vector<std::vector<double>> cs;
  for (int i = 0; i < 6; ++i) {
    std::vector<double> c(5);
    for (auto& v : c) v = rng.next_in(-1.0, 1.0);
    cs.push_back(std::move(c));
  }
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> q(5);
    for (auto& v : q) v = rng.next_in(-1.0, 1.0);
    uint32_t got = nearest_centroid(q, cs);
    uint32_t want = 0;
    double best = -2.0;
    for (uint32_t c = 0; c < cs.size(); ++c) {
      double val = cosine(q, cs[c]);
      if (val > best) {
        best = val;
        want = c;
      }
    }
    CHECK(got == want);
  }
}

TEST_CASE("columns expose one cell per row and dummies match the mask") {
  auto blobs = make_blobs(17, 8, 11);
  auto match = unit_rows(blobs.points);
  ClusterConfig cfg{3, 20, 1};
  auto model = cluster(blobs.points, match, cfg);

  auto col0 = model.column(0);
  CHECK(col0.size() == model.k());
  CHECK_THROWS_AS(model.column(model.columns()), IndexOutOfRange);

  // multiset of all cells = all stored signatures + zero dummies
  std::map<std::vector<double>, int> cells;
  size_t dummies = 0;
  for (uint32_t j = 0; j < model.columns(); ++j) {
    for (auto& cell : model.column(j)) {
      bool zero = true;
      for (double v : cell) zero &= v == 0.0;
      if (zero) {
        ++dummies;
      } else {
        cells[cell]++;
      }
    }
  }
  std::map<std::vector<double>, int> want;
  for (const auto& sig : match) want[sig]++;
  CHECK(cells == want);
  CHECK(dummies ==
        size_t(model.k()) * model.columns() - blobs.points.size());

  // pad_mask marks exactly the dummies
  size_t masked = 0;
  for (uint32_t r = 0; r < model.k(); ++r) {
    for (uint32_t j = 0; j < model.columns(); ++j) {
      if (model.is_dummy(r, j)) {
        ++masked;
        for (uint32_t i = 0; i < model.match_length(); ++i) {
          CHECK(model.cell(r, j)[i] == 0.0);
        }
      }
    }
  }
  CHECK(masked == dummies);
}

TEST_CASE("partition: row sizes sum to dataset size, M >= ceil(n/k)") {
  auto blobs = make_blobs(40, 12, 13);
  auto match = unit_rows(blobs.points);
  ClusterConfig cfg{5, 20, 17};
  auto model = cluster(blobs.points, match, cfg);
  uint64_t total = 0;
  for (uint32_t r = 0; r < model.k(); ++r) total += model.row_size(r);
  CHECK(total == blobs.points.size());
  CHECK(model.columns() >=
        (blobs.points.size() + model.k() - 1) / model.k());
  // each element appears exactly once
  std::vector<int> seen(size_t(model.k()) * model.columns(), 0);
  for (const auto& ref : model.assignment()) {
    seen[size_t(ref.row) * model.columns() + ref.col]++;
  }
  for (int c : seen) CHECK(c <= 1);
}

TEST_CASE("padding neutrality: dummy cosine is exactly zero") {
  std::vector<double> dummy(50, 0.0);
  Prng rng(3);
  std::vector<double> q(50);
  for (auto& v : q) v = rng.next_in(-1.0, 1.0);
  CHECK(cosine(dummy, q) == 0.0);
}

TEST_CASE("objective is non-increasing across iterations") {
  auto blobs = make_blobs(50, 16, 23);
  auto match = unit_rows(blobs.points);
  ClusterConfig cfg{2, 20, 29};
  auto model = cluster(blobs.points, match, cfg);
  const auto& hist = model.objective_history();
  REQUIRE(hist.size() >= 2);
  for (size_t i = 1; i < hist.size(); ++i) {
    CHECK(hist[i] <= hist[i - 1] + 1e-9);
  }
}

TEST_CASE("fixed seed gives identical models") {
  auto blobs = make_blobs(30, 10, 31);
  auto match = unit_rows(blobs.points);
  ClusterConfig cfg{3, 20, 37};
  auto m1 = cluster(blobs.points, match, cfg);
  auto m2 = cluster(blobs.points, match, cfg);
  CHECK(m1.columns() == m2.columns());
  for (uint32_t r = 0; r < m1.k(); ++r) {
    CHECK(m1.centroid(r) == m2.centroid(r));
    for (uint32_t j = 0; j < m1.columns(); ++j) {
      CHECK(m1.is_dummy(r, j) == m2.is_dummy(r, j));
    }
  }
}

TEST_CASE("errors") {
  std::vector<std::vector<double>> pts{{1.0, 0.0}, {0.0, 1.0}};
  auto match = unit_rows(pts);
  CHECK_THROWS_AS(cluster(pts, match, ClusterConfig{5, 20, 1}), TooFewPoints);
  CHECK_THROWS_AS(cluster({}, {}, ClusterConfig{1, 20, 1}), EmptyDataset);
}

TEST_CASE("model file roundtrip") {
  auto blobs = make_blobs(15, 8, 41);
  auto match = unit_rows(blobs.points);
  ClusterConfig cfg{3, 20, 43};
  auto model = cluster(blobs.points, match, cfg);
  model.scaler.means.assign(8, 0.25);
  model.scaler.stds.assign(8, 0.5);
  model.encoding_params.seed = 77;

  std::string path = "test_model.clmd";
  model.save(path);
  auto back = ClusterModel::load(path);
  CHECK(back.k() == model.k());
  CHECK(back.columns() == model.columns());
  CHECK(back.match_length() == model.match_length());
  CHECK(back.scaler.means == model.scaler.means);
  CHECK(back.encoding_params.seed == 77);
  for (uint32_t r = 0; r < model.k(); ++r) {
    CHECK(back.centroid(r) == model.centroid(r));
    for (uint32_t j = 0; j < model.columns(); ++j) {
      CHECK(back.is_dummy(r, j) == model.is_dummy(r, j));
      for (uint32_t i = 0; i < model.match_length(); ++i) {
        CHECK(back.cell(r, j)[i] == model.cell(r, j)[i]);
      }
    }
  }
  std::remove(path.c_str());
}
