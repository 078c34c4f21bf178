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

#include "hesearch/protocol/driver.h"

#include <chrono>
#include <list>
#include <mutex>
#include <thread>

#include "hesearch/error.h"

namespace hesearch::protocol {
namespace {

constexpr std::chrono::milliseconds kAcceptPoll{200};

}  // namespace

SearchReport run_search(transport::Endpoint& endpoint, const he::Backend& backend,
                        const he::Ciphertext& target, const he::SecretKey& sk,
                        const ClientOptions& options) {
  ClientSession session(backend, sk, options);
  SearchReport report;
  transport::TrafficCounters traffic;
  try {
    Message next = session.start(target);
    for (;;) {
      endpoint.send_frame(encode_message(next));
      Message reply = decode_message(backend, endpoint.recv_frame());
      auto step = session.on_message(reply);
      if (auto* outcome = std::get_if<SearchOutcome>(&step)) {
        report.outcome = *outcome;
        traffic = endpoint.counters();
        if (auto bye = session.farewell()) {
          try {
            endpoint.send_frame(encode_message(*bye));
          } catch (const Error&) {
            // The outcome is already known; a server that left early is fine.
          }
        }
        break;
      }
      next = std::move(std::get<Message>(step));
    }
  } catch (...) {
    endpoint.close();
    throw;
  }
  endpoint.close();
  report.n_padded = session.n_padded();
  report.messages_paper = session.messages_paper();
  report.messages_wire = traffic.frames_sent + traffic.frames_received;
  report.bytes_up = traffic.bytes_sent;
  report.bytes_down = traffic.bytes_received;
  report.pivots = session.pivots();
  return report;
}

SessionSummary serve_connection(transport::Endpoint& endpoint, const he::Backend& backend,
                                ServerSession& session) {
  SessionSummary summary;
  summary.n_real = session.n_real();
  try {
    while (session.state() != ServerSession::State::kDone) {
      auto frame = endpoint.try_recv_frame();
      if (!frame) {
        summary.end = "closed";
        break;
      }
      auto reply = session.on_message(decode_message(backend, *frame));
      if (reply) endpoint.send_frame(encode_message(*reply));
    }
    if (summary.end.empty()) summary.end = "done";
  } catch (const Error& e) {
    summary.end = "error:" + std::string(error_code_name(e.code()));
    try {
      endpoint.send_frame(encode_message(ErrorMessage{e.code(), e.what()}));
    } catch (const Error&) {
      // The peer is gone; nothing more to report to it.
    }
  }
  endpoint.close();
  summary.messages_paper = session.messages_paper();
  summary.traffic = endpoint.counters();
  summary.build_ms = session.build_ms();
  return summary;
}

Server::Server(std::shared_ptr<const he::Backend> backend,
               std::shared_ptr<const prodtree::Dataset> data, he::EvaluationKeys keys,
               prodtree::BuildOptions build, transport::EndpointOptions endpoint)
    : backend_(std::move(backend)),
      data_(std::move(data)),
      keys_(std::move(keys)),
      build_(build),
      endpoint_(endpoint) {
  prodtree::check_dataset(*backend_, *data_);
}

void Server::run(transport::TcpListener& listener, std::stop_token stop,
                 const std::function<void(const SessionSummary&)>& on_session) {
  struct Worker {
    std::shared_ptr<std::atomic<bool>> finished;
    std::jthread thread;
  };
  std::mutex report_mutex;
  std::list<Worker> workers;
  while (!stop.stop_requested()) {
    workers.remove_if([](const Worker& w) { return w.finished->load(); });
    auto stream = listener.accept(kAcceptPoll);
    if (!stream) continue;
    const std::uint64_t id = next_id_++;
    auto finished = std::make_shared<std::atomic<bool>>(false);
    std::jthread thread([this, id, finished, &report_mutex, &on_session,
                         stream = std::move(stream)]() mutable {
      SessionSummary summary;
      try {
        transport::Endpoint endpoint(transport::Role::kServer, std::move(stream), endpoint_);
        ServerSession session(backend_, data_, keys_, build_);
        summary = serve_connection(endpoint, *backend_, session);
      } catch (const Error& e) {
        summary.end = "error:" + std::string(error_code_name(e.code()));
      }
      summary.id = id;
      {
        std::lock_guard lock(report_mutex);
        if (on_session) on_session(summary);
      }
      finished->store(true);
    });
    workers.push_back({std::move(finished), std::move(thread)});
  }
  workers.clear();
}

}  // namespace hesearch::protocol
