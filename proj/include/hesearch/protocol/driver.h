/*
 * Copyright 2026 The hesearch Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HESEARCH_PROTOCOL_DRIVER_H_
#define HESEARCH_PROTOCOL_DRIVER_H_

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <stop_token>
#include <string>
#include <vector>

#include "hesearch/protocol/session.h"
#include "hesearch/transport/endpoint.h"

namespace hesearch::protocol {

struct SearchReport {
  SearchOutcome outcome;
  std::size_t n_padded = 0;
  // Root, Descend and Children frames.
  std::uint64_t messages_paper = 0;
  // Every frame up to the outcome, SearchRequest included. Traffic counts
  // leave out the closing NotFound sent after a root rejection.
  std::uint64_t messages_wire = 0;
  std::uint64_t bytes_up = 0;
  std::uint64_t bytes_down = 0;
  std::vector<std::uint64_t> pivots;
};

// Runs one search over a connected endpoint and closes it afterwards.
SearchReport run_search(transport::Endpoint& endpoint, const he::Backend& backend,
                        const he::Ciphertext& target, const he::SecretKey& sk,
                        const ClientOptions& options);

struct SessionSummary {
  std::uint64_t id = 0;
  std::size_t n_real = 0;
  std::uint64_t messages_paper = 0;
  transport::TrafficCounters traffic;
  double build_ms = 0;
  // "done", "closed" (peer hung up before done) or "error:<code>".
  std::string end;
};

// Serves one connection until the session is done, the peer closes, or an
// error frame has been sent.
SessionSummary serve_connection(transport::Endpoint& endpoint, const he::Backend& backend,
                                ServerSession& session);

// TCP accept loop with one thread per connection.
class Server {
 public:
  Server(std::shared_ptr<const he::Backend> backend,
         std::shared_ptr<const prodtree::Dataset> data, he::EvaluationKeys keys,
         prodtree::BuildOptions build = {}, transport::EndpointOptions endpoint = {});

  // Returns once `stop` is requested; waits for running sessions.
  void run(transport::TcpListener& listener, std::stop_token stop,
           const std::function<void(const SessionSummary&)>& on_session);

 private:
  std::shared_ptr<const he::Backend> backend_;
  std::shared_ptr<const prodtree::Dataset> data_;
  he::EvaluationKeys keys_;
  prodtree::BuildOptions build_;
  transport::EndpointOptions endpoint_;
  std::atomic<std::uint64_t> next_id_{1};
};

}  // namespace hesearch::protocol

#endif  // HESEARCH_PROTOCOL_DRIVER_H_
