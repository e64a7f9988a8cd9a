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

#include <cstdlib>

#include "hefuzz/common.hpp"
#include "hefuzz/kernels.hpp"

namespace hefuzz::kernels {

namespace {

const Funcs* pick_default() {
  if (const char* env = std::getenv("HEFUZZ_KERNELS")) {
    std::string want = env;
    if (want == "scalar") return &scalar();
    if (want == "avx2" && avx2() != nullptr) return avx2();
    // Unknown or unavailable request falls through to auto-detection.
  }
  if (const Funcs* v = avx2()) return v;
  return &scalar();
}

const Funcs*& current() {
  static const Funcs* funcs = pick_default();
  return funcs;
}

}  // namespace

const Funcs& active() { return *current(); }

void force_backend(const std::string& name) {
  if (name == "scalar") {
    current() = &scalar();
    return;
  }
  if (name == "avx2") {
    if (const Funcs* v = avx2()) {
      current() = v;
      return;
    }
    throw ConfigError("avx2 kernels not available on this CPU");
  }
  throw ConfigError("unknown kernel backend: " + name);
}

std::string active_name() { return active().name; }

}  // namespace hefuzz::kernels
