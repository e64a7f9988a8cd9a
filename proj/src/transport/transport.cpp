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

#include "hefuzz/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <sstream>

#include "hefuzz/common.hpp"

namespace hefuzz::transport {

namespace {

constexpr uint64_t kMaxFrame = uint64_t(1) << 31;

void check_frame(const Frame& frame) {
  if (frame.payload.size() + 1 >= kMaxFrame) {
    throw FrameCorrupt("frame exceeds 2^31 bytes");
  }
  if (uint8_t(frame.type) > uint8_t(MsgType::Error)) {
    throw FrameCorrupt("unknown message type");
  }
}

std::string frame_header(const Frame& frame) {
  uint32_t len = uint32_t(frame.payload.size() + 1);
  std::string hdr(5, '\0');
  for (int i = 0; i < 4; ++i) hdr[size_t(i)] = char((len >> (8 * i)) & 0xff);
  hdr[4] = char(frame.type);
  return hdr;
}

class QueueChannel : public Channel {
 public:
  struct Queue {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<Frame> frames;
    bool closed = false;
  };

  QueueChannel(std::shared_ptr<Queue> out, std::shared_ptr<Queue> in)
      : out_(std::move(out)), in_(std::move(in)) {}

  ~QueueChannel() override {
    std::lock_guard lock(out_->mu);
    out_->closed = true;
    out_->cv.notify_all();
  }

  void send(const Frame& frame) override {
    check_frame(frame);
    std::lock_guard lock(out_->mu);
    if (out_->closed) throw TransportFailure("channel closed");
    out_->frames.push_back(frame);
    out_->cv.notify_all();
  }

  Frame recv() override {
    std::unique_lock lock(in_->mu);
    in_->cv.wait(lock, [&] { return !in_->frames.empty() || in_->closed; });
    if (in_->frames.empty()) throw TransportFailure("channel closed");
    Frame f = std::move(in_->frames.front());
    in_->frames.pop_front();
    return f;
  }

  std::optional<Frame> try_recv() override {
    std::lock_guard lock(in_->mu);
    if (in_->frames.empty()) return std::nullopt;
    Frame f = std::move(in_->frames.front());
    in_->frames.pop_front();
    return f;
  }

 private:
  std::shared_ptr<Queue> out_;
  std::shared_ptr<Queue> in_;
};

class TcpChannel : public Channel {
 public:
  explicit TcpChannel(int fd) : fd_(fd) {
    int flag = 1;
    setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &flag, sizeof(flag));
  }

  ~TcpChannel() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void send(const Frame& frame) override {
    check_frame(frame);
    std::string hdr = frame_header(frame);
    write_all(hdr.data(), hdr.size());
    write_all(frame.payload.data(), frame.payload.size());
  }

  Frame recv() override {
    uint8_t hdr[5];
    read_all(hdr, 5);
    uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= uint32_t(hdr[i]) << (8 * i);
    if (len == 0 || len >= kMaxFrame) throw FrameCorrupt("bad frame length");
    Frame f;
    if (hdr[4] > uint8_t(MsgType::Error)) {
      throw FrameCorrupt("unknown message type");
    }
    f.type = MsgType(hdr[4]);
    f.payload.resize(len - 1);
    read_all(f.payload.data(), f.payload.size());
    return f;
  }

  std::optional<Frame> try_recv() override {
    pollfd pfd{fd_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, 0);
    if (rc <= 0 || (pfd.revents & POLLIN) == 0) return std::nullopt;
    return recv();
  }

 private:
  void write_all(const void* data, size_t len) {
    const char* p = static_cast<const char*>(data);
    while (len > 0) {
      ssize_t n = ::send(fd_, p, len, MSG_NOSIGNAL);
      if (n <= 0) throw TransportFailure("send failed");
      p += n;
      len -= size_t(n);
    }
  }

  void read_all(void* data, size_t len) {
    char* p = static_cast<char*>(data);
    while (len > 0) {
      ssize_t n = ::recv(fd_, p, len, 0);
      if (n == 0) throw TransportFailure("peer closed connection");
      if (n < 0) throw TransportFailure("recv failed");
      p += n;
      len -= size_t(n);
    }
  }

  int fd_;
};

}  // namespace

const char* msg_type_name(MsgType t) {
  switch (t) {
    case MsgType::Setup: return "Setup";
    case MsgType::CentroidQuery: return "CentroidQuery";
    case MsgType::CentroidScores: return "CentroidScores";
    case MsgType::ColumnQuery: return "ColumnQuery";
    case MsgType::ColumnScore: return "ColumnScore";
    case MsgType::Done: return "Done";
    case MsgType::Error: return "Error";
  }
  return "Unknown";
}

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>>
make_channel_pair() {
  auto q_ab = std::make_shared<QueueChannel::Queue>();
  auto q_ba = std::make_shared<QueueChannel::Queue>();
  return {std::make_unique<QueueChannel>(q_ab, q_ba),
          std::make_unique<QueueChannel>(q_ba, q_ab)};
}

std::unique_ptr<Channel> tcp_connect(const std::string& host, uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw TransportFailure("socket() failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw TransportFailure("bad address: " + host);
  }
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    throw TransportFailure("connect failed: " + host);
  }
  return std::make_unique<TcpChannel>(fd);
}

TcpListener::TcpListener(const std::string& bind_host, uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw BindFailure("socket() failed");
  int one = 1;
  setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw BindFailure("bad bind address: " + bind_host);
  }
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(fd_, 4) != 0) {
    ::close(fd_);
    throw BindFailure("cannot bind " + bind_host + ":" + std::to_string(port));
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

TcpListener::~TcpListener() { close(); }

void TcpListener::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

std::unique_ptr<Channel> TcpListener::accept() {
  int cfd = ::accept(fd_, nullptr, nullptr);
  if (cfd < 0) throw TransportFailure("accept failed");
  return std::make_unique<TcpChannel>(cfd);
}

TranscriptLog::TranscriptLog() : start_(std::chrono::steady_clock::now()) {}

void TranscriptLog::record(char direction, MsgType type, uint64_t bytes) {
  double millis = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start_)
                      .count();
  entries.push_back(
      {uint32_t(entries.size()), direction, type, bytes, millis});
  if (direction == '>') {
    sent_bytes += bytes;
  } else {
    recv_bytes += bytes;
  }
}

double TranscriptLog::first_seen_millis(MsgType type) const {
  for (const auto& e : entries) {
    if (e.type == type) return e.millis;
  }
  return -1.0;
}

uint64_t TranscriptLog::total_bytes(MsgType type, char direction) const {
  uint64_t total = 0;
  for (const auto& e : entries) {
    if (e.type == type && e.direction == direction) total += e.bytes;
  }
  return total;
}

std::string TranscriptLog::to_csv() const {
  std::ostringstream out;
  out << "seq,direction,msg_type,bytes,millis\n";
  for (const auto& e : entries) {
    out << e.seq << ',' << e.direction << ',' << msg_type_name(e.type) << ','
        << e.bytes << ',' << e.millis << '\n';
  }
  return out.str();
}

void LoggingChannel::send(const Frame& frame) {
  inner_.send(frame);
  log_.record('>', frame.type, frame.wire_size());
}

Frame LoggingChannel::recv() {
  Frame f = inner_.recv();
  log_.record('<', f.type, f.wire_size());
  return f;
}

std::optional<Frame> LoggingChannel::try_recv() {
  auto f = inner_.try_recv();
  if (f.has_value()) {
    log_.record('<', f->type, f->wire_size());
  }
  return f;
}

CostSummary report(const TranscriptLog& transcript,
                   const CostScenario& scenario) {
  CostSummary s;
  s.per_column_constant = true;
  for (const auto& e : transcript.entries) {
    switch (e.type) {
      case MsgType::Setup:
        s.setup_bytes += e.bytes;
        break;
      case MsgType::CentroidQuery:
        s.centroid_query_bytes += e.bytes;
        break;
      case MsgType::CentroidScores:
        s.centroid_score_bytes += e.bytes;
        break;
      case MsgType::ColumnQuery:
        s.column_query_bytes += e.bytes;
        break;
      case MsgType::ColumnScore:
        s.column_score_bytes += e.bytes;
        s.column_score_frames += 1;
        if (s.per_column_bytes == 0) {
          s.per_column_bytes = e.bytes;
        } else if (s.per_column_bytes != e.bytes) {
          s.per_column_constant = false;
        }
        break;
      default:
        break;
    }
  }
  s.linear_response_bytes = scenario.dataset_size * s.per_column_bytes;
  s.clustered_response_bytes = uint64_t(scenario.columns) * s.per_column_bytes;
  if (s.clustered_response_bytes > 0) {
    s.reduction_factor = double(s.linear_response_bytes) /
                         double(s.clustered_response_bytes);
  }
  return s;
}

std::string CostSummary::to_json(const CostScenario& scenario) const {
  std::ostringstream out;
  out << "{\n"
      << "  \"dataset_size\": " << scenario.dataset_size << ",\n"
      << "  \"clusters\": " << scenario.clusters << ",\n"
      << "  \"columns\": " << scenario.columns << ",\n"
      << "  \"setup_bytes\": " << setup_bytes << ",\n"
      << "  \"centroid_query_bytes\": " << centroid_query_bytes << ",\n"
      << "  \"centroid_score_bytes\": " << centroid_score_bytes << ",\n"
      << "  \"column_query_bytes\": " << column_query_bytes << ",\n"
      << "  \"column_score_bytes\": " << column_score_bytes << ",\n"
      << "  \"column_score_frames\": " << column_score_frames << ",\n"
      << "  \"per_column_bytes\": " << per_column_bytes << ",\n"
      << "  \"per_column_constant\": " << (per_column_constant ? "true" : "false")
      << ",\n"
      << "  \"linear_response_bytes\": " << linear_response_bytes << ",\n"
      << "  \"clustered_response_bytes\": " << clustered_response_bytes << ",\n"
      << "  \"reduction_factor\": " << reduction_factor << "\n"
      << "}\n";
  return out.str();
}

}  // namespace hefuzz::transport
