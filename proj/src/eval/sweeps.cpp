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

#include <sstream>
#include <unordered_set>

#include "hefuzz/eval.hpp"

namespace hefuzz::eval {

std::vector<SweepPoint> sweep_threshold(const ReferenceMatcher& matcher,
                                        const std::vector<QueryCase>& queries,
                                        const std::vector<double>& taus) {
  std::vector<bool> truth;
  truth.reserve(queries.size());
  for (const auto& q : queries) truth.push_back(q.is_member);

  // Cosines do not depend on tau; match once, threshold afterwards.
  std::vector<double> best_cos;
  best_cos.reserve(queries.size());
  for (const auto& q : queries) {
    best_cos.push_back(matcher.match(q.name, 2.0).best_cos);
  }

  std::vector<SweepPoint> out;
  for (double tau : taus) {
    std::vector<bool> verdicts;
    verdicts.reserve(queries.size());
    for (double cos : best_cos) verdicts.push_back(cos > tau);
    out.push_back({tau, evaluate(verdicts, truth)});
  }
  return out;
}

std::vector<ClusterSweepPoint> sweep_clusters(
    const Dataset& dataset, const encoding::EncodingParams& params,
    const std::vector<uint32_t>& cluster_counts, uint32_t iterations,
    uint64_t seed, double tau) {
  std::vector<bool> truth;
  truth.reserve(dataset.queries.size());
  for (const auto& q : dataset.queries) truth.push_back(q.is_member);

  std::vector<ClusterSweepPoint> out;
  for (uint32_t k : cluster_counts) {
    ReferenceMatcher matcher(dataset.responder, params, k, iterations, seed);
    ClusterSweepPoint point;
    point.clusters = k;
    point.metrics = evaluate(matcher.verdicts(dataset.queries, tau), truth);
    if (k != 0) {
      point.columns = matcher.model().columns();
      point.coverage = matcher.model().coverage().cumulative;
    }
    out.push_back(std::move(point));
  }
  return out;
}

std::vector<LdSweepPoint> sweep_ld(const NamePool& pool,
                                   const encoding::EncodingParams& params,
                                   size_t n_names, size_t queries_per_level,
                                   uint64_t seed, double tau,
                                   uint32_t clusters, uint32_t iterations) {
  std::vector<LdSweepPoint> out;
  Prng rng(seed);
  DatasetSpec base;
  base.n_names = n_names;
  base.seed = seed;
  base.positives = 0;
  base.negatives = 0;
  base.encoding = params;
  Dataset dataset = generate_dataset(pool, base);
  ReferenceMatcher matcher(dataset.responder, params, clusters, iterations,
                           seed);

  std::unordered_set<std::string> members(dataset.responder.begin(),
                                          dataset.responder.end());
  for (int ld = 0; ld <= 5; ++ld) {
    std::vector<bool> verdicts;
    std::vector<bool> truth;
    for (size_t i = 0; i < queries_per_level; ++i) {
      uint32_t src = uint32_t(rng.next_below(dataset.responder.size()));
      std::string positive = perturb_to_ld(dataset.responder[src], ld, rng);
      verdicts.push_back(matcher.match(positive, tau).matched);
      truth.push_back(true);
    }
    // Equal count of fresh non-member negatives keeps precision observable.
    for (size_t i = 0; i < queries_per_level; ++i) {
      std::string neg;
      do {
        neg = draw_name(pool, base, rng);
      } while (members.count(neg) != 0);
      verdicts.push_back(matcher.match(neg, tau).matched);
      truth.push_back(false);
    }
    LdSweepPoint point;
    point.ld = ld;
    point.metrics = evaluate(verdicts, truth);
    out.push_back(point);
  }
  return out;
}

std::string metrics_csv(const std::vector<SweepPoint>& rows,
                        const std::string& param_name) {
  std::ostringstream out;
  out << param_name << ",accuracy,precision,recall,f1,tp,fp,tn,fn\n";
  for (const auto& row : rows) {
    out << row.param << ',' << row.metrics.accuracy << ','
        << row.metrics.precision << ',' << row.metrics.recall << ','
        << row.metrics.f1 << ',' << row.metrics.tp << ',' << row.metrics.fp
        << ',' << row.metrics.tn << ',' << row.metrics.fn << '\n';
  }
  return out.str();
}

std::string coverage_csv(const std::vector<uint64_t>& cumulative) {
  std::ostringstream out;
  out << "column,names_covered\n";
  for (size_t j = 0; j < cumulative.size(); ++j) {
    out << (j + 1) << ',' << cumulative[j] << '\n';
  }
  return out.str();
}

}  // namespace hefuzz::eval
