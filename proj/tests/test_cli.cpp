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

#include <sys/stat.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "hefuzz/clustering.hpp"
#include "hefuzz/eval.hpp"

namespace {

std::string bin() { return HEFUZZ_BIN; }

int run_cmd(const std::string& cmd) {
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

bool fs_exists(const std::string& path) {
  return std::filesystem::exists(path);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_lines(const std::string& path,
                 const std::vector<std::string>& lines) {
  std::ofstream out(path);
  for (const auto& l : lines) out << l << "\n";
}

struct TempDir {
  std::string path;
  TempDir() {
    char tmpl[] = "/tmp/hefuzz_cli_XXXXXX";
    path = mkdtemp(tmpl);
  }
  ~TempDir() { run_cmd("rm -rf " + path); }
};

}  // namespace

TEST_CASE("encode: determinism, partial failure exit code") {
  TempDir dir;
  write_lines(dir.path + "/names.txt", {"Mary Janes", "John Doe", "Al White"});
  std::string base = bin() + " encode --in " + dir.path + "/names.txt" +
                     " --encoding-seed 7 --out-dir " + dir.path;
  CHECK(run_cmd(base + " --out " + dir.path + "/a.mhsg") == 0);
  CHECK(run_cmd(base + " --out " + dir.path + "/b.mhsg") == 0);
  CHECK(slurp(dir.path + "/a.mhsg") == slurp(dir.path + "/b.mhsg"));

  // a too-short name flags partial failure but the run continues
  write_lines(dir.path + "/bad.txt", {"Mary Janes", "ab", "John Doe"});
  int rc = run_cmd(bin() + " encode --in " + dir.path + "/bad.txt --out " +
                   dir.path + "/c.mhsg --out-dir " + dir.path +
                   " 2>/dev/null");
  CHECK(rc == 2);
  hefuzz::encoding::EncodingParams params;
  auto sigs = hefuzz::encoding::read_signature_file(dir.path + "/c.mhsg",
                                                    &params);
  CHECK(sigs.size() == 2);

  // empty input file produces an empty signature file, exit 0
  write_lines(dir.path + "/empty.txt", {});
  CHECK(run_cmd(bin() + " encode --in " + dir.path + "/empty.txt --out " +
                dir.path + "/e.mhsg --out-dir " + dir.path) == 0);
  auto empty = hefuzz::encoding::read_signature_file(dir.path + "/e.mhsg",
                                                     nullptr);
  CHECK(empty.empty());
}

TEST_CASE("cluster: model roundtrip and k default") {
  TempDir dir;
  auto pool = hefuzz::eval::NamePool::load_default();
  hefuzz::eval::DatasetSpec spec;
  spec.n_names = 64;
  spec.seed = 9;
  spec.positives = 0;
  spec.negatives = 0;
  auto data = hefuzz::eval::generate_dataset(pool, spec);
  write_lines(dir.path + "/names.txt", data.responder);

  std::string model_path = dir.path + "/model.clmd";
  int rc = run_cmd(bin() + " cluster --in " + dir.path +
                   "/names.txt --out " + model_path +
                   " --seed 5 --encoding-seed 7 --out-dir " + dir.path +
                   " > " + dir.path + "/cluster.log");
  CHECK(rc == 0);
  auto model = hefuzz::clustering::ClusterModel::load(model_path);
  CHECK(model.k() == 8);  // round(sqrt(64))
  CHECK(model.real_count() == 64);
  auto log = slurp(dir.path + "/cluster.log");
  CHECK(log.find("k=8") != std::string::npos);

  // k larger than the dataset fails with a nonzero exit
  CHECK(run_cmd(bin() + " cluster --in " + dir.path + "/names.txt --out " +
                dir.path + "/m2.clmd --k 100 --encoding-seed 7 --out-dir " +
                dir.path + " 2>/dev/null") != 0);
}

TEST_CASE("serve/query loopback: verdicts match in-process run") {
  TempDir dir;
  auto pool = hefuzz::eval::NamePool::load_default();
  hefuzz::eval::DatasetSpec spec;
  spec.n_names = 50;
  spec.seed = 13;
  spec.positives = 0;
  spec.negatives = 0;
  auto data = hefuzz::eval::generate_dataset(pool, spec);
  write_lines(dir.path + "/names.txt", data.responder);
  write_lines(dir.path + "/queries.txt",
              {data.responder[0], "zzqqxxvv kk", data.responder[7]});

  REQUIRE(run_cmd(bin() + " cluster --in " + dir.path + "/names.txt --out " +
                  dir.path + "/model.clmd --seed 3 --encoding-seed 11 " +
                  "--out-dir " + dir.path + " >/dev/null") == 0);

  const uint16_t port = 17911;
  std::thread server([&] {
    run_cmd(bin() + " serve --model " + dir.path +
            "/model.clmd --bind 127.0.0.1 --port " + std::to_string(port) +
            " --mask-seed 5 --out-dir " + dir.path +
            "/serve-out >/dev/null 2>&1 &");
  });
  server.join();
  // wait for the responder to come up
  std::this_thread::sleep_for(std::chrono::milliseconds(600));

  int rc = run_cmd(bin() + " query --names " + dir.path +
                   "/queries.txt --host 127.0.0.1 --port " +
                   std::to_string(port) + " --seed 2 --out-dir " + dir.path +
                   "/query-out >/dev/null");
  CHECK(rc == 0);
  auto verdicts = slurp(dir.path + "/query-out/verdicts.csv");
  CHECK(verdicts.find("0,1,") != std::string::npos);   // member matched
  CHECK(verdicts.find("1,0,") != std::string::npos);   // garbage did not
  CHECK(verdicts.find("2,1,") != std::string::npos);
  CHECK(slurp(dir.path + "/query-out/cost.json")
            .find("reduction_factor") != std::string::npos);

  // a second sequential session against the same server: same verdicts,
  // independent transcript file
  int rc2 = run_cmd(bin() + " query --names " + dir.path +
                    "/queries.txt --host 127.0.0.1 --port " +
                    std::to_string(port) + " --seed 4 --out-dir " + dir.path +
                    "/query-out2 >/dev/null");
  CHECK(rc2 == 0);
  auto verdicts2 = slurp(dir.path + "/query-out2/verdicts.csv");
  CHECK(verdicts2.find("0,1,") != std::string::npos);
  CHECK(verdicts2.find("1,0,") != std::string::npos);

  run_cmd("pkill -f 'hefuzz serve' 2>/dev/null");
  std::this_thread::sleep_for(std::chrono::milliseconds(200));
  CHECK(fs_exists(dir.path + "/serve-out/session_0.csv"));
  CHECK(fs_exists(dir.path + "/serve-out/session_1.csv"));
}

TEST_CASE("query against a dead responder exits with protocol failure") {
  TempDir dir;
  write_lines(dir.path + "/queries.txt", {"Mary Janes"});
  int rc = run_cmd(bin() + " query --names " + dir.path +
                   "/queries.txt --host 127.0.0.1 --port 1 --out-dir " +
                   dir.path + " 2>/dev/null");
  CHECK(rc == 3);
}

TEST_CASE("keygen refuses without the explicit flag, writes 0600 with it") {
  TempDir dir;
  std::string key_path = dir.path + "/keys.bin";
  CHECK(run_cmd(bin() + " keygen --out " + key_path + " 2>/dev/null") == 4);
  CHECK(run_cmd(bin() + " keygen --out " + key_path +
                " --write-secret >/dev/null") == 0);
  struct stat st{};
  REQUIRE(stat(key_path.c_str(), &st) == 0);
  CHECK((st.st_mode & 0777) == 0600);
}

TEST_CASE("bench threshold scenario emits a monotone recall column") {
  TempDir dir;
  int rc = run_cmd(bin() + " bench --scenario threshold --names 300 "
                   "--queries 60 --seed 3 --encoding-seed 5 --out-dir " +
                   dir.path + " >/dev/null");
  CHECK(rc == 0);
  auto csv = slurp(dir.path + "/threshold_sweep.csv");
  // parse the recall column (index 3) and check the trend
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  double prev = 2.0;
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string field;
    for (int i = 0; i < 4; ++i) std::getline(ls, field, ',');
    double recall = std::stod(field);
    CHECK(recall <= prev + 1e-12);
    prev = recall;
    ++rows;
  }
  CHECK(rows == 10);
  CHECK(slurp(dir.path + "/resolved_config.toml").size() > 0);
}
