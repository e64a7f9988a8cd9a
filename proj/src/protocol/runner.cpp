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

#include <exception>
#include <thread>

#include "hefuzz/protocol.hpp"

namespace hefuzz::protocol {

ProtocolResult run_protocol(const QuerierConfig& querier_cfg,
                            const ResponderConfig& responder_cfg,
                            const std::vector<std::string>& names) {
  auto [querier_end, responder_end] = transport::make_channel_pair();
  ProtocolResult result;
  transport::LoggingChannel querier_channel(*querier_end,
                                            result.querier_transcript);
  transport::LoggingChannel responder_channel(*responder_end,
                                              result.responder_transcript);

  std::exception_ptr responder_error;
  std::thread responder_thread([&] {
    try {
      ResponderSession session(responder_cfg);
      session.serve(responder_channel);
    } catch (...) {
      responder_error = std::current_exception();
    }
  });

  std::exception_ptr querier_error;
  try {
    QuerierSession session(querier_cfg, names);
    result.verdicts = session.run(querier_channel);
  } catch (...) {
    querier_error = std::current_exception();
  }
  // Dropping the querier endpoint unblocks a responder stuck on recv.
  querier_end.reset();
  responder_thread.join();
  if (querier_error) std::rethrow_exception(querier_error);
  if (responder_error) std::rethrow_exception(responder_error);
  return result;
}

}  // namespace hefuzz::protocol
