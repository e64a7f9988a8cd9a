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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "hefuzz/ckks/serialize.hpp"
#include "hefuzz/common.hpp"
#include "hefuzz/eval.hpp"
#include "hefuzz/protocol.hpp"

namespace fs = std::filesystem;
using namespace hefuzz;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 2;
constexpr int kExitProtocol = 3;
constexpr int kExitConfig = 4;

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop.store(true); }

std::vector<std::string> read_names(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
      line.pop_back();
    }
    names.push_back(line);
  }
  while (!names.empty() && names.back().empty()) names.pop_back();
  return names;
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(content.data(), std::streamsize(content.size()));
}

void echo_config(CLI::App& app, const std::string& out_dir) {
  fs::create_directories(out_dir);
  write_file(out_dir + "/resolved_config.toml",
             app.config_to_str(true, false));
}

struct CommonOpts {
  encoding::EncodingParams encoding;
  std::string out_dir = ".";
};

void add_encoding_opts(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--shingle-size", opts.encoding.shingle_size,
                  "shingle size in characters");
  cmd->add_option("--max-hash", opts.encoding.max_hash,
                  "exclusive hash space bound");
  cmd->add_option("--encoding-seed", opts.encoding.seed,
                  "shared hash family seed");
  cmd->add_option("--out-dir", opts.out_dir, "artifact output directory");
}

clustering::ClusterModel build_model(const std::vector<std::string>& names,
                                     const encoding::EncodingParams& params,
                                     uint32_t k, uint32_t iters,
                                     uint64_t seed) {
  eval::ReferenceMatcher matcher(names, params,
                                 k == 0 ? clustering::default_cluster_count(
                                              names.size())
                                        : k,
                                 iters, seed);
  return matcher.release_model();
}

int cmd_keygen(uint64_t seed, const std::string& out, bool write_secret,
               const ckks::HeParams& params) {
  if (!write_secret) {
    std::cerr << "refusing to write secret key material without "
                 "--write-secret\n";
    return kExitConfig;
  }
  auto ctx = ckks::Context::create(params);
  auto keys = ckks::keygen(*ctx, seed);
  std::string blob;
  auto append = [&](std::string_view part) {
    uint32_t len = uint32_t(part.size());
    for (int i = 0; i < 4; ++i) blob.push_back(char((len >> (8 * i)) & 0xff));
    blob.append(part);
  };
  append(ckks::serialize_params(params));
  append(ckks::serialize_secret_key(*ctx, keys.secret));
  append(ckks::serialize_public_key(*ctx, keys.pub));
  append(ckks::serialize_relin_key(*ctx, keys.relin));
  write_file(out, blob);
  ::chmod(out.c_str(), S_IRUSR | S_IWUSR);  // 0600
  std::cout << "keyset written to " << out << " (mode 0600)\n";
  return kExitOk;
}

int cmd_encode(const std::string& in, const std::string& out,
               uint32_t length, const CommonOpts& opts) {
  auto names = read_names(in);
  encoding::EncodingParams params = opts.encoding;
  params.num_permutations = length;
  std::vector<encoding::MinHashSignature> sigs;
  size_t failures = 0;
  for (size_t i = 0; i < names.size(); ++i) {
    try {
      sigs.push_back(encoding::minhash_signature(names[i], params));
    } catch (const NameTooShort&) {
      std::cerr << "line " << (i + 1) << ": name too short, skipped\n";
      ++failures;
    }
  }
  encoding::write_signature_file(out, sigs, params);
  std::cout << "encoded " << sigs.size() << " signatures to " << out << "\n";
  return failures == 0 ? kExitOk : kExitPartial;
}

int cmd_cluster(const std::string& in, const std::string& out, uint32_t k,
                uint32_t iters, uint64_t seed, const CommonOpts& opts) {
  auto names = read_names(in);
  names.erase(std::remove(names.begin(), names.end(), std::string{}),
              names.end());
  auto model = build_model(names, opts.encoding, k, iters, seed);
  model.save(out);
  auto coverage = model.coverage();
  auto columns_for = [&](double share) {
    uint64_t want = uint64_t(share * double(model.real_count()));
    for (size_t j = 0; j < coverage.cumulative.size(); ++j) {
      if (coverage.cumulative[j] >= want) return j + 1;
    }
    return coverage.cumulative.size();
  };
  std::cout << "clustered " << names.size() << " names: k=" << model.k()
            << " columns=" << model.columns() << "\n"
            << "coverage: 50% in " << columns_for(0.5) << " cols, 80% in "
            << columns_for(0.8) << ", 90% in " << columns_for(0.9) << "\n"
            << "model written to " << out << "\n";
  return kExitOk;
}

int cmd_serve(const std::string& model_path, const std::string& bind,
              uint16_t port, double tau, int threads, uint64_t mask_seed,
              const std::string& out_dir) {
  protocol::ResponderConfig cfg;
  cfg.model = clustering::ClusterModel::load(model_path);
  cfg.tau = tau;
  cfg.threads = threads;
  cfg.mask_seed = mask_seed;

  std::signal(SIGTERM, handle_signal);
  std::signal(SIGINT, handle_signal);
  transport::TcpListener listener(bind, port);
  std::cout << "serving model (k=" << cfg.model.k()
            << ", M=" << cfg.model.columns() << ") on " << bind << ":"
            << listener.port() << std::endl;
  fs::create_directories(out_dir);
  size_t session_id = 0;
  while (!g_stop.load()) {
    std::unique_ptr<transport::Channel> channel;
    try {
      channel = listener.accept();
    } catch (const TransportFailure&) {
      break;  // listener closed under us (shutdown)
    }
    transport::TranscriptLog transcript;
    transport::LoggingChannel logged(*channel, transcript);
    try {
      protocol::ResponderSession session(cfg);
      session.serve(logged);
    } catch (const Error& e) {
      std::cerr << "session " << session_id << " aborted: " << e.what()
                << "\n";
    }
    write_file(out_dir + "/session_" + std::to_string(session_id) + ".csv",
               transcript.to_csv());
    ++session_id;
  }
  std::cout << "responder stopped after " << session_id << " sessions\n";
  return kExitOk;
}

int cmd_query(const std::string& names_path, const std::string& host,
              uint16_t port, double tau, bool no_early_exit, uint64_t seed,
              const std::string& out_dir) {
  auto names = read_names(names_path);
  names.erase(std::remove(names.begin(), names.end(), std::string{}),
              names.end());
  protocol::QuerierConfig cfg;
  cfg.keygen_seed = seed;
  cfg.early_exit = !no_early_exit;
  cfg.expect_tau = tau;

  auto channel = transport::tcp_connect(host, port);
  transport::TranscriptLog transcript;
  transport::LoggingChannel logged(*channel, transcript);
  protocol::QuerierSession session(cfg, names);
  auto verdicts = session.run(logged);

  fs::create_directories(out_dir);
  std::ostringstream lines;
  lines << "query_id,matched,columns_consumed\n";
  for (const auto& v : verdicts) {
    lines << v.query_id << ',' << (v.matched ? 1 : 0) << ','
          << v.columns_consumed << '\n';
  }
  write_file(out_dir + "/verdicts.csv", lines.str());
  write_file(out_dir + "/transcript.csv", transcript.to_csv());
  transport::CostScenario scenario{0, session.setup().clusters,
                                   session.setup().columns};
  write_file(out_dir + "/cost.json",
             transport::report(transcript, scenario).to_json(scenario));
  size_t matched = 0;
  for (const auto& v : verdicts) matched += v.matched ? 1 : 0;
  std::cout << matched << "/" << verdicts.size() << " queries matched\n";
  return kExitOk;
}

int cmd_bench(const std::string& scenario, size_t n_names, size_t n_queries,
              uint64_t seed, double tau, uint32_t clusters,
              const CommonOpts& opts) {
  fs::create_directories(opts.out_dir);
  auto pool = eval::NamePool::load_default();
  encoding::EncodingParams params = opts.encoding;

  if (scenario == "threshold") {
    eval::DatasetSpec spec;
    spec.n_names = n_names;
    spec.seed = seed;
    spec.positives = n_queries / 5;
    spec.negatives = n_queries - spec.positives;
    spec.encoding = params;
    auto dataset = eval::generate_dataset(pool, spec);
    eval::ReferenceMatcher matcher(dataset.responder, params,
                                   clusters == 0
                                       ? clustering::default_cluster_count(
                                             dataset.responder.size())
                                       : clusters,
                                   20, seed);
    std::vector<double> taus;
    for (double t = 0.5; t < 0.951; t += 0.05) taus.push_back(t);
    auto rows = eval::sweep_threshold(matcher, dataset.queries, taus);
    write_file(opts.out_dir + "/threshold_sweep.csv",
               eval::metrics_csv(rows, "tau"));
    std::cout << "threshold sweep written ("
              << rows.size() << " points)\n";
    return kExitOk;
  }
  if (scenario == "clusters") {
    eval::DatasetSpec spec;
    spec.n_names = n_names;
    spec.seed = seed;
    spec.positives = n_queries / 2;
    spec.negatives = n_queries - spec.positives;
    spec.encoding = params;
    auto dataset = eval::generate_dataset(pool, spec);
    std::vector<uint32_t> ks = {0, clusters == 0 ? 50 : clusters};
    auto rows = eval::sweep_clusters(dataset, params, ks, 20, seed, tau);
    std::ostringstream csv;
    csv << "clusters,columns,accuracy,precision,recall,f1\n";
    for (const auto& r : rows) {
      csv << r.clusters << ',' << r.columns << ',' << r.metrics.accuracy << ','
          << r.metrics.precision << ',' << r.metrics.recall << ','
          << r.metrics.f1 << '\n';
      if (!r.coverage.empty()) {
        write_file(opts.out_dir + "/coverage_k" + std::to_string(r.clusters) +
                       ".csv",
                   eval::coverage_csv(r.coverage));
      }
    }
    write_file(opts.out_dir + "/cluster_sweep.csv", csv.str());
    std::cout << "cluster sweep written (" << rows.size() << " points)\n";
    return kExitOk;
  }
  if (scenario == "ld") {
    auto rows = eval::sweep_ld(pool, params, n_names, n_queries, seed, tau,
                               clusters == 0
                                   ? clustering::default_cluster_count(n_names)
                                   : clusters,
                               20);
    std::ostringstream csv;
    csv << "ld,accuracy,precision,recall,f1\n";
    for (const auto& r : rows) {
      csv << r.ld << ',' << r.metrics.accuracy << ',' << r.metrics.precision
          << ',' << r.metrics.recall << ',' << r.metrics.f1 << '\n';
    }
    write_file(opts.out_dir + "/ld_sweep.csv", csv.str());
    std::cout << "ld sweep written (" << rows.size() << " points)\n";
    return kExitOk;
  }
  if (scenario == "comm" || scenario == "batch") {
    eval::DatasetSpec spec;
    spec.n_names = n_names;
    spec.seed = seed;
    spec.positives = n_queries / 2;
    spec.negatives = n_queries - spec.positives;
    spec.encoding = params;
    auto dataset = eval::generate_dataset(pool, spec);
    uint32_t k = clusters == 0
                     ? clustering::default_cluster_count(n_names)
                     : clusters;
    auto model = build_model(dataset.responder, params, k, 20, seed);

    std::vector<size_t> batches;
    if (scenario == "batch") {
      batches = {1, 10, 100};
    } else {
      batches = {n_queries};
    }
    std::ostringstream md;
    md << "| data size | clusters | total cols | first round s | time/col s "
          "| comm/col |\n|---|---|---|---|---|---|\n";
    for (size_t batch : batches) {
      std::vector<std::string> queries;
      for (size_t i = 0; i < batch; ++i) {
        queries.push_back(dataset.queries[i % dataset.queries.size()].name);
      }
      protocol::ResponderConfig rcfg;
      rcfg.model = model;
      rcfg.tau = tau;
      rcfg.threads = int(std::thread::hardware_concurrency());
      protocol::QuerierConfig qcfg;
      qcfg.keygen_seed = seed;
      qcfg.early_exit = false;  // full-column costs, as in the cost tables
      auto t0 = std::chrono::steady_clock::now();
      auto result = protocol::run_protocol(qcfg, rcfg, queries);
      auto t1 = std::chrono::steady_clock::now();
      double total_s = std::chrono::duration<double>(t1 - t0).count();
      transport::CostScenario cs{dataset.responder.size(), model.k(),
                                 model.columns()};
      auto summary = transport::report(result.querier_transcript, cs);
      write_file(opts.out_dir + "/transcript_batch" + std::to_string(batch) +
                     ".csv",
                 result.querier_transcript.to_csv());
      write_file(opts.out_dir + "/cost_batch" + std::to_string(batch) +
                     ".json",
                 summary.to_json(cs));
      md << "| " << dataset.responder.size() << " | " << model.k() << " | "
         << model.columns() << " | " << total_s << " | "
         << total_s / double(model.columns()) << " | "
         << summary.per_column_bytes << " B |\n";
      std::cout << "batch " << batch << ": " << total_s << " s total, "
                << summary.per_column_bytes << " B/column, reduction x"
                << summary.reduction_factor << "\n";
    }
    write_file(opts.out_dir + "/report.md", md.str());
    return kExitOk;
  }
  std::cerr << "unknown scenario: " << scenario << "\n";
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hefuzz: privacy-preserving fuzzy name matching"};
  app.set_config("--config")->envname("HEFUZZ_CONFIG");
  app.require_subcommand(1);

  CommonOpts opts;

  // keygen
  auto* keygen = app.add_subcommand("keygen", "generate a CKKS keyset");
  uint64_t kg_seed = 1;
  std::string kg_out = "keys.bin";
  bool kg_write_secret = false;
  keygen->add_option("--seed", kg_seed, "keygen seed");
  keygen->add_option("--out", kg_out, "output keyset path");
  keygen->add_flag("--write-secret", kg_write_secret,
                   "acknowledge writing secret key material");

  // encode
  auto* encode = app.add_subcommand("encode", "MinHash-encode a name list");
  std::string enc_in, enc_out = "signatures.mhsg";
  uint32_t enc_len = encoding::kMatchLength;
  encode->add_option("--in", enc_in, "newline-delimited names")->required();
  encode->add_option("--out", enc_out, "signature file");
  encode->add_option("--length", enc_len, "signature length");
  add_encoding_opts(encode, opts);

  // cluster
  auto* cluster = app.add_subcommand("cluster", "build the responder model");
  std::string cl_in, cl_out = "model.clmd";
  uint32_t cl_k = 0, cl_iters = 20;
  uint64_t cl_seed = 1;
  cluster->add_option("--in", cl_in, "newline-delimited names")->required();
  cluster->add_option("--out", cl_out, "model file");
  cluster->add_option("--k", cl_k, "cluster count (0 = round(sqrt(n)))");
  cluster->add_option("--iters", cl_iters, "k-means iterations");
  cluster->add_option("--seed", cl_seed, "clustering seed");
  add_encoding_opts(cluster, opts);

  // serve
  auto* serve = app.add_subcommand("serve", "run the responder");
  std::string sv_model, sv_bind = "127.0.0.1";
  uint16_t sv_port = 7710;
  double sv_tau = 0.9;
  int sv_threads = 1;
  uint64_t sv_mask_seed = 0;
  std::string sv_out = "serve-out";
  serve->add_option("--model", sv_model, "model file")->required();
  serve->add_option("--bind", sv_bind, "bind address");
  serve->add_option("--port", sv_port, "tcp port (0 = ephemeral)");
  serve->add_option("--tau", sv_tau, "cosine similarity threshold");
  serve->add_option("--threads", sv_threads, "column worker threads");
  serve->add_option("--mask-seed", sv_mask_seed, "mask prng seed (0 = random)");
  serve->add_option("--out-dir", sv_out, "transcript directory");

  // query
  auto* query = app.add_subcommand("query", "run the querier");
  std::string qr_names, qr_host = "127.0.0.1";
  uint16_t qr_port = 7710;
  double qr_tau = 0.9;
  bool qr_no_early = false;
  uint64_t qr_seed = 1;
  std::string qr_out = "query-out";
  query->add_option("--names", qr_names, "queries, one per line")->required();
  query->add_option("--host", qr_host, "responder host");
  query->add_option("--port", qr_port, "responder port");
  query->add_option("--tau", qr_tau, "expected threshold");
  query->add_flag("--no-early-exit", qr_no_early, "consume all columns");
  query->add_option("--seed", qr_seed, "keygen seed");
  query->add_option("--out-dir", qr_out, "output directory");

  // bench
  auto* bench = app.add_subcommand("bench", "desk-scale evaluation scenarios");
  std::string bn_scenario = "threshold";
  size_t bn_names = 1000, bn_queries = 200;
  uint64_t bn_seed = 1;
  double bn_tau = 0.9;
  uint32_t bn_clusters = 0;
  bench->add_option("--scenario", bn_scenario,
                    "threshold | clusters | ld | comm | batch");
  bench->add_option("--names", bn_names, "responder dataset size");
  bench->add_option("--queries", bn_queries, "query count");
  bench->add_option("--seed", bn_seed, "dataset seed");
  bench->add_option("--tau", bn_tau, "threshold");
  bench->add_option("--clusters", bn_clusters, "cluster count (0 = sqrt(n))");
  add_encoding_opts(bench, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*keygen) return cmd_keygen(kg_seed, kg_out, kg_write_secret, {});
    if (*encode) {
      echo_config(app, opts.out_dir);
      return cmd_encode(enc_in, enc_out, enc_len, opts);
    }
    if (*cluster) {
      echo_config(app, opts.out_dir);
      return cmd_cluster(cl_in, cl_out, cl_k, cl_iters, cl_seed, opts);
    }
    if (*serve) {
      return cmd_serve(sv_model, sv_bind, sv_port, sv_tau, sv_threads,
                       sv_mask_seed, sv_out);
    }
    if (*query) {
      return cmd_query(qr_names, qr_host, qr_port, qr_tau, qr_no_early,
                       qr_seed, qr_out);
    }
    if (*bench) {
      echo_config(app, opts.out_dir);
      return cmd_bench(bn_scenario, bn_names, bn_queries, bn_seed, bn_tau,
                       bn_clusters, opts);
    }
  } catch (const TransportFailure& e) {
    std::cerr << "transport failure: " << e.what() << "\n";
    return kExitProtocol;
  } catch (const ProtocolPhaseViolation& e) {
    std::cerr << "protocol failure: " << e.what() << "\n";
    return kExitProtocol;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
