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
#include <unordered_set>

#include "hefuzz/common.hpp"
#include "hefuzz/eval.hpp"
#include "hefuzz/kernels.hpp"

namespace hefuzz::eval {

size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string perturb_to_ld(const std::string& name, int ld, Prng& rng) {
  if (ld == 0) return name;
  const std::string letters = "abcdefghijklmnopqrstuvwxyz";
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::string s = name;
    for (int e = 0; e < ld; ++e) {
      int op = int(rng.next_below(3));
      if (s.size() <= 4) op = 0;  // keep enough material to shingle
      size_t pos = size_t(rng.next_below(s.size()));
      char c = letters[rng.next_below(letters.size())];
      switch (op) {
        case 0:
          s.insert(s.begin() + long(pos), c);
          break;
        case 1:
          s.erase(s.begin() + long(pos));
          break;
        default:
          s[pos] = c;
          break;
      }
    }
    if (levenshtein(name, s) == size_t(ld)) return s;
  }
  throw PoolExhausted("could not hit the requested edit distance");
}

std::string draw_name(const NamePool& pool, const DatasetSpec& spec,
                      Prng& rng) {
  std::string name = pool.given[rng.next_below(pool.given.size())];
  if (rng.next_double() < spec.middle_name_prob) {
    name += " " + pool.given[rng.next_below(pool.given.size())];
    if (rng.next_double() < spec.second_middle_prob) {
      name += " " + pool.given[rng.next_below(pool.given.size())];
    }
  }
  name += " " + pool.family[rng.next_below(pool.family.size())];
  if (rng.next_double() < spec.double_family_prob) {
    name += "-" + pool.family[rng.next_below(pool.family.size())];
  }
  return name;
}

Dataset generate_dataset(const NamePool& pool, const DatasetSpec& spec) {
  if (pool.given.empty() || pool.family.empty()) {
    throw PoolExhausted("name pool is empty");
  }
  Prng rng(spec.seed);
  Dataset out;
  std::unordered_set<std::string> taken;

  auto draw_given = [&] { return pool.given[rng.next_below(pool.given.size())]; };
  auto draw_family = [&] {
    return pool.family[rng.next_below(pool.family.size())];
  };

  size_t combos = pool.given.size() * pool.family.size();
  if (spec.n_names + spec.negatives > combos / 2) {
    throw PoolExhausted("dataset too large for the name pool");
  }
  out.responder.reserve(spec.n_names);
  while (out.responder.size() < spec.n_names) {
    std::string name = draw_name(pool, spec, rng);
    if (taken.insert(name).second) out.responder.push_back(name);
  }

  // Positives: perturbed members carrying their source id.
  for (size_t i = 0; i < spec.positives; ++i) {
    uint32_t src = uint32_t(rng.next_below(out.responder.size()));
    int ld = spec.positive_lds.empty()
                 ? 0
                 : spec.positive_lds[i % spec.positive_lds.size()];
    QueryCase q;
    q.name = perturb_to_ld(out.responder[src], ld, rng);
    q.is_member = true;
    q.source_id = src;
    q.ld = ld;
    out.queries.push_back(std::move(q));
  }

  // Negatives: fresh non-members, length-matched to the positive they stand
  // next to, verified against the responder signatures in match space.
  std::vector<std::vector<double>> responder_sigs;
  if (spec.negatives > 0) {
    encoding::DualEncoder encoder(spec.encoding);
    responder_sigs.reserve(out.responder.size());
    for (const auto& name : out.responder) {
      responder_sigs.push_back(encoding::normalize(encoder.encode(name).el50));
    }
    const auto& k = kernels::active();
    size_t rejected = 0;
    size_t hard_wanted = size_t(spec.hard_negative_share * double(spec.negatives));
    // Near-miss negative: a responder record with one name part replaced.
    auto draw_hard = [&] {
      const std::string& base =
          out.responder[rng.next_below(out.responder.size())];
      std::vector<std::string> parts;
      size_t start = 0;
      for (size_t p = 0; p <= base.size(); ++p) {
        if (p == base.size() || base[p] == ' ' || base[p] == '-') {
          parts.push_back(base.substr(start, p - start));
          if (p < base.size()) parts.push_back(std::string(1, base[p]));
          start = p + 1;
        }
      }
      size_t word = rng.next_below((parts.size() + 1) / 2) * 2;
      parts[word] = word == 0 ? draw_given() : draw_family();
      std::string name;
      for (const auto& piece : parts) name += piece;
      return name;
    };
    for (size_t i = 0; i < spec.negatives; ++i) {
      bool hard = i < hard_wanted;
      size_t want_len =
          spec.positives > 0 ? out.queries[i % spec.positives].name.size() : 0;
      std::string candidate;
      for (int attempt = 0;; ++attempt) {
        if (attempt > 5000) throw PoolExhausted("cannot draw enough negatives");
        candidate = hard ? draw_hard() : draw_name(pool, spec, rng);
        if (taken.count(candidate) != 0) continue;
        if (!hard && want_len != 0 &&
            (candidate.size() + 1 < want_len || candidate.size() > want_len + 1)) {
          continue;
        }
        auto sig = encoding::normalize(encoder.encode(candidate).el50);
        double best = -1.0;
        for (const auto& ref : responder_sigs) {
          best = std::max(best, k.dot_f64(sig.data(), ref.data(), sig.size()));
          if (best >= spec.negative_cos_limit) break;
        }
        if (best >= spec.negative_cos_limit) {
          ++rejected;
          continue;
        }
        break;
      }
      taken.insert(candidate);
      QueryCase q;
      q.name = candidate;
      q.is_member = false;
      q.ld = -1;
      out.queries.push_back(std::move(q));
    }
    // The rejection loop enforces the sub-threshold property by construction;
    // a pool where almost every draw collides cannot yield a fair negative set.
    if (rejected > spec.negatives * 50) {
      throw PoolExhausted("negative pool too close to the responder set");
    }
  }
  return out;
}

}  // namespace hefuzz::eval
