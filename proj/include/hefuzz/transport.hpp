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

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace hefuzz::transport {

enum class MsgType : uint8_t {
  Setup = 0,
  CentroidQuery = 1,
  CentroidScores = 2,
  ColumnQuery = 3,
  ColumnScore = 4,
  Done = 5,
  Error = 6,
};

const char* msg_type_name(MsgType t);

struct Frame {
  MsgType type = MsgType::Setup;
  std::string payload;

  size_t wire_size() const { return 5 + payload.size(); }
};

// Duplex, ordered, frame-oriented channel. Frames are length-prefixed:
// {u32 length = 1 + payload bytes, u8 msg_type, payload}.
class Channel {
 public:
  virtual ~Channel() = default;
  virtual void send(const Frame& frame) = 0;
  virtual Frame recv() = 0;
  // Non-blocking poll; the responder checks for an early Done between columns.
  virtual std::optional<Frame> try_recv() = 0;
};

// In-process pair of channels backed by two queues.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>>
make_channel_pair();

// TCP channels (blocking sockets, loopback or LAN).
std::unique_ptr<Channel> tcp_connect(const std::string& host, uint16_t port);

class TcpListener {
 public:
  TcpListener(const std::string& bind_host, uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::unique_ptr<Channel> accept();
  uint16_t port() const { return port_; }
  void close();

 private:
  int fd_ = -1;
  uint16_t port_ = 0;
};

struct TranscriptEntry {
  uint32_t seq = 0;
  char direction = '>';  // '>' sent, '<' received
  MsgType type = MsgType::Setup;
  uint64_t bytes = 0;
  double millis = 0.0;  // wall time since the transcript started
};

struct TranscriptLog {
  TranscriptLog();
  std::vector<TranscriptEntry> entries;
  uint64_t sent_bytes = 0;
  uint64_t recv_bytes = 0;

  void record(char direction, MsgType type, uint64_t bytes);
  uint64_t total_bytes(MsgType type, char direction) const;
  // Timestamp of the first entry of the given type, -1 when absent.
  double first_seen_millis(MsgType type) const;
  std::string to_csv() const;

 private:
  std::chrono::steady_clock::time_point start_;
};

// Wraps a channel, appending every frame to the transcript in causal order.
class LoggingChannel : public Channel {
 public:
  LoggingChannel(Channel& inner, TranscriptLog& log)
      : inner_(inner), log_(log) {}
  void send(const Frame& frame) override;
  Frame recv() override;
  std::optional<Frame> try_recv() override;

 private:
  Channel& inner_;
  TranscriptLog& log_;
};

struct CostScenario {
  uint64_t dataset_size = 0;  // |N_B|
  uint32_t clusters = 0;
  uint32_t columns = 0;  // M
};

struct CostSummary {
  uint64_t setup_bytes = 0;
  uint64_t centroid_query_bytes = 0;
  uint64_t centroid_score_bytes = 0;
  uint64_t column_query_bytes = 0;
  uint64_t column_score_bytes = 0;
  uint64_t column_score_frames = 0;
  uint64_t per_column_bytes = 0;      // constant frame size, 0 if none seen
  bool per_column_constant = false;
  uint64_t linear_response_bytes = 0;     // |N_B| * per-score bytes
  uint64_t clustered_response_bytes = 0;  // M * per-score bytes
  double reduction_factor = 0.0;
  std::string to_json(const CostScenario& scenario) const;
};

// Communication accounting over a finished session transcript, from the
// querier's perspective.
CostSummary report(const TranscriptLog& transcript,
                   const CostScenario& scenario);

}  // namespace hefuzz::transport
