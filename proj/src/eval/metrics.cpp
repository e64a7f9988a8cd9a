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

#include "hefuzz/common.hpp"
#include "hefuzz/eval.hpp"

namespace hefuzz::eval {

MetricsReport evaluate(const std::vector<bool>& verdicts,
                       const std::vector<bool>& truth) {
  if (verdicts.size() != truth.size()) {
    throw LengthMismatch("verdicts/truth length mismatch");
  }
  MetricsReport m;
  for (size_t i = 0; i < verdicts.size(); ++i) {
    if (truth[i] && verdicts[i]) ++m.tp;
    if (!truth[i] && verdicts[i]) ++m.fp;
    if (!truth[i] && !verdicts[i]) ++m.tn;
    if (truth[i] && !verdicts[i]) ++m.fn;
  }
  uint64_t total = verdicts.size();
  m.accuracy = total == 0 ? 0.0 : double(m.tp + m.tn) / double(total);
  // Precision with no positive predictions is reported as 0, not NaN.
  m.precision = (m.tp + m.fp) == 0 ? 0.0 : double(m.tp) / double(m.tp + m.fp);
  m.recall = (m.tp + m.fn) == 0 ? 0.0 : double(m.tp) / double(m.tp + m.fn);
  m.f1 = (m.precision + m.recall) == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

}  // namespace hefuzz::eval
