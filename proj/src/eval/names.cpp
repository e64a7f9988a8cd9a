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
#include <fstream>

#include "hefuzz/common.hpp"
#include "hefuzz/eval.hpp"

namespace hefuzz::eval {

namespace {

std::vector<std::string> load_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open name pool: " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
      line.pop_back();
    }
    if (!line.empty()) out.push_back(line);
  }
  if (out.empty()) throw PoolExhausted("empty name pool: " + path);
  return out;
}

}  // namespace

NamePool NamePool::load(const std::string& dir) {
  NamePool pool;
  pool.given = load_lines(dir + "/given_names.txt");
  pool.family = load_lines(dir + "/family_names.txt");
  return pool;
}

NamePool NamePool::load_default() {
  if (const char* env = std::getenv("HEFUZZ_DATA")) {
    return load(env);
  }
  return load(HEFUZZ_DATA_DIR);
}

}  // namespace hefuzz::eval
