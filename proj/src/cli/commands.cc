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

#include "hesearch/cli/commands.h"

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <thread>

#include "hesearch/error.h"
#include "hesearch/he/registry.h"
#include "hesearch/he/serialization.h"
#include "hesearch/prodtree/tree.h"
#include "hesearch/protocol/driver.h"
#include "hesearch/random.h"
#include "hesearch/transport/endpoint.h"

namespace hesearch::cli {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string read_text(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  Bytes bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Backend and keys named by a key file.
struct LoadedKeys {
  std::shared_ptr<he::Backend> backend;
  he::KeyPair keys;
};

LoadedKeys load_keys(const std::string& path) {
  Bytes bytes = read_file(path);
  LoadedKeys out;
  out.backend = he::backend_for_params_id(he::key_file_params_id(bytes));
  out.keys = he::parse_key_file(*out.backend, bytes);
  return out;
}

std::string params_summary(std::string_view preset, const he::SchemeParams& params) {
  std::ostringstream s;
  s << "preset " << preset << ": ";
  if (params.backend == he::BackendTag::kPlain) {
    s << "plain reference backend, unbounded depth, plaintext bound " << params.plaintext_bound;
    return s.str();
  }
  const auto& c = *params.ckks;
  s << "ckks N=" << c.ring_degree << " primes=" << c.moduli.size() << " bits=";
  for (std::size_t i = 0; i < c.moduli.size(); ++i) {
    s << (i ? "+" : "") << std::bit_width(c.moduli[i]);
  }
  s << " scale=2^" << std::log2(c.scale) << " max-depth=" << params.max_depth
    << " plaintext-bound=" << params.plaintext_bound;
  return s.str();
}

int report_error(std::ostream& err, const std::exception& e) {
  err << "error: " << e.what() << "\n";
  return kExitError;
}

// Values for one benchmark trial: a random target, one planted match and
// non-matching values whose distance to the target lies in [0.9, 1.1].
struct Trial {
  std::vector<double> values;
  double target = 0;
  std::size_t match = 0;
};

Trial make_trial(std::size_t n, std::mt19937_64& rng) {
  Trial t;
  t.target = static_cast<double>(std::uniform_int_distribution<int>(-8, 8)(rng));
  t.match = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  std::uniform_real_distribution<double> gap(0.9, 1.1);
  std::bernoulli_distribution sign(0.5);
  t.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.values[i] = i == t.match ? t.target : t.target + (sign(rng) ? gap(rng) : -gap(rng));
  }
  return t;
}

protocol::ClientOptions client_options(he::BackendTag backend,
                                       const std::optional<double>& epsilon,
                                       const std::optional<std::string>& mode) {
  protocol::ClientOptions options = protocol::default_client_options(backend);
  if (epsilon) options.epsilon = *epsilon;
  if (mode) {
    if (*mode == "strict") {
      options.mode = protocol::Mode::kStrict;
    } else if (*mode == "robust") {
      options.mode = protocol::Mode::kRobust;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "mode must be strict or robust");
    }
  }
  return options;
}

}  // namespace

std::vector<double> parse_values(std::string_view text) {
  std::vector<double> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    line = trim(line);
    if (line.empty()) continue;
    std::string_view number = line.front() == '+' ? line.substr(1) : line;
    double v = 0;
    auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), v);
    if (ec != std::errc() || ptr != number.data() + number.size() || !std::isfinite(v)) {
      throw Error(ErrorCode::kMalformed,
                  "line " + std::to_string(line_no) + ": '" + std::string(line) +
                      "' is not a finite decimal number");
    }
    out.push_back(v);
  }
  return out;
}

int cmd_keygen(const KeygenArgs& args, std::ostream& out, std::ostream& err) {
  try {
    he::SchemeParams params = he::preset_params(args.preset);
    if (he::preset_is_insecure(args.preset)) {
      err << "WARNING: preset '" << args.preset
          << "' is INSECURE and must only be used for testing\n";
    }
    auto backend = he::make_backend(params);
    const std::uint64_t seed = args.seed ? *args.seed : Prng::from_entropy().next_u64();
    he::KeyPair keys = backend->keygen(seed);
    write_file(args.out, he::serialize_key_file(keys, true));
    write_file(args.out + ".pub", he::serialize_key_file(keys, false));
    out << params_summary(args.preset, params) << "\n";
    out << "wrote " << args.out << " and " << args.out << ".pub\n";
    return 0;
  } catch (const Error& e) {
    return report_error(err, e);
  }
}

int cmd_encrypt(const EncryptArgs& args, std::ostream& out, std::ostream& err) {
  try {
    LoadedKeys loaded = load_keys(args.public_keys);
    std::vector<double> values = parse_values(read_text(args.values));
    if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "dataset must be nonempty");
    prodtree::Dataset data;
    data.params_id = loaded.backend->params_id();
    data.items.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      try {
        data.items.push_back(loaded.backend->encrypt(loaded.keys.public_key, values[i]));
      } catch (const Error& e) {
        throw Error(e.code(), "value " + std::to_string(i + 1) + " (" + std::to_string(values[i]) +
                                  "): " + e.what());
      }
    }
    write_file(args.out, prodtree::serialize_dataset(data));
    out << "encrypted " << values.size() << " values under " << data.params_id << " to "
        << args.out << "\n";
    return 0;
  } catch (const Error& e) {
    return report_error(err, e);
  }
}

int cmd_serve(const ServeArgs& args, std::ostream& out, std::ostream& err, std::stop_token stop) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
  spdlog::logger log("serve", sink);
  log.set_pattern("%Y-%m-%dT%H:%M:%S.%e %l %v");
  try {
    LoadedKeys loaded = load_keys(args.public_keys);
    // The server keeps evaluation keys only, even if handed a full key file.
    he::EvaluationKeys keys = he::EvaluationKeys::from(loaded.keys);
    loaded.keys = {};
    auto data = std::make_shared<prodtree::Dataset>(
        prodtree::parse_dataset(*loaded.backend, read_file(args.data)));
    prodtree::BuildOptions build;
    build.expected_gap = args.expected_gap;
    build.threads = args.threads;
    if (prodtree::required_depth(data->items.size(), build) > loaded.backend->max_depth()) {
      throw Error(ErrorCode::kDepthExhausted,
                  "dataset of " + std::to_string(data->items.size()) +
                      " items needs more depth than " + loaded.backend->params_id() + " has");
    }
    transport::TcpListener listener(transport::parse_address(args.listen));
    protocol::Server server(loaded.backend, data, keys, build);
    out << "listening on " << transport::parse_address(args.listen).host << ":"
        << listener.port() << "\n"
        << std::flush;
    log.info("serving n={} params={}", data->items.size(), loaded.backend->params_id());

    std::stop_source local;
    std::stop_callback forward(stop, [&] { local.request_stop(); });
    std::size_t sessions = 0;
    server.run(listener, local.get_token(), [&](const protocol::SessionSummary& s) {
      log.info("session={} n={} messages={} frames={} bytes_up={} bytes_down={} build_ms={:.1f} "
               "end={}",
               s.id, s.n_real, s.messages_paper,
               s.traffic.frames_received + s.traffic.frames_sent, s.traffic.bytes_received,
               s.traffic.bytes_sent, s.build_ms, s.end);
      if (args.max_sessions && ++sessions >= *args.max_sessions) local.request_stop();
    });
    return 0;
  } catch (const Error& e) {
    log.error("{}", e.what());
    return kExitError;
  }
}

int cmd_search(const SearchArgs& args, std::ostream& out, std::ostream& err) {
  try {
    LoadedKeys loaded = load_keys(args.keys);
    if (loaded.keys.secret_key.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "key file " + args.keys + " has no secret key");
    }
    const protocol::ClientOptions options =
        client_options(loaded.backend->tag(), args.epsilon, args.mode);
    he::Ciphertext target = loaded.backend->encrypt(loaded.keys.public_key, args.target);
    transport::EndpointOptions endpoint_options;
    endpoint_options.timeout = std::chrono::milliseconds(static_cast<long>(args.timeout_s * 1000));
    transport::Endpoint endpoint(
        transport::Role::kClient,
        transport::tcp_connect(transport::parse_address(args.connect), endpoint_options.timeout),
        endpoint_options);
    const auto start = Clock::now();
    protocol::SearchReport report =
        protocol::run_search(endpoint, *loaded.backend, target, loaded.keys.secret_key, options);
    if (args.stats) {
      err << "messages_paper=" << report.messages_paper
          << " messages_wire=" << report.messages_wire << " bytes_up=" << report.bytes_up
          << " bytes_down=" << report.bytes_down << " n_padded=" << report.n_padded
          << " search_ms=" << elapsed_ms(start) << " pivots=";
      for (std::size_t i = 0; i < report.pivots.size(); ++i) {
        err << (i ? "," : "") << report.pivots[i];
      }
      err << "\n";
    }
    if (report.outcome.found()) {
      out << *report.outcome.index << "\n";
      return kExitFound;
    }
    out << "not found\n";
    return kExitNotFound;
  } catch (const Error& e) {
    return report_error(err, e);
  }
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.n.empty()) throw Error(ErrorCode::kInvalidArgument, "--n needs at least one size");
    if (args.trials == 0) throw Error(ErrorCode::kInvalidArgument, "--trials must be positive");
    std::shared_ptr<he::Backend> backend = he::make_backend(args.backend);
    const protocol::ClientOptions client =
        client_options(backend->tag(), args.epsilon, args.mode);
    prodtree::BuildOptions build;
    build.expected_gap = args.expected_gap;
    for (std::size_t n : args.n) {
      if (n == 0) throw Error(ErrorCode::kInvalidArgument, "dataset sizes must be positive");
      if (prodtree::required_depth(n, build) > backend->max_depth()) {
        throw Error(ErrorCode::kDepthExhausted, "n=" + std::to_string(n) +
                                                    " needs more depth than " +
                                                    backend->params_id() + " provides");
      }
    }
    he::KeyPair keys = backend->keygen(args.seed);
    he::EvaluationKeys eval = he::EvaluationKeys::from(keys);
    std::mt19937_64 rng(args.seed);

    std::ofstream file;
    if (!args.out.empty()) {
      file.open(args.out);
      if (!file) throw Error(ErrorCode::kIo, "cannot write " + args.out);
    }
    std::ostream& csv = args.out.empty() ? out : file;
    csv << kBenchHeader << "\n";

    int deviations = 0;
    for (std::size_t n : args.n) {
      for (std::size_t trial = 0; trial < args.trials; ++trial) {
        Trial t = make_trial(n, rng);
        auto data = std::make_shared<prodtree::Dataset>();
        data->params_id = backend->params_id();
        for (double v : t.values) data->items.push_back(backend->encrypt(keys.public_key, v));
        he::Ciphertext target = backend->encrypt(keys.public_key, t.target);

        auto [client_stream, server_stream] = transport::make_pipe();
        transport::Endpoint client_ep(transport::Role::kClient, std::move(client_stream));
        transport::Endpoint server_ep(transport::Role::kServer, std::move(server_stream));
        protocol::ServerSession session(backend, data, eval, build);
        backend->reset_counts();
        protocol::SessionSummary summary;
        std::jthread server(
            [&] { summary = protocol::serve_connection(server_ep, *backend, session); });
        const auto start = Clock::now();
        protocol::SearchReport report =
            protocol::run_search(client_ep, *backend, target, keys.secret_key, client);
        server.join();
        const double total_ms = elapsed_ms(start);
        const std::uint64_t hmul = backend->counts().hmul;
        const std::size_t p = prodtree::padded_size(n);

        const bool ok = report.messages_paper == protocol::expected_message_count(p) &&
                        report.messages_wire == report.messages_paper + 1 && hmul == p - 1 &&
                        report.outcome == protocol::SearchOutcome{t.match};
        if (!ok) {
          ++deviations;
          err << "deviation: n=" << n << " trial=" << trial
              << " messages_paper=" << report.messages_paper
              << " expected=" << protocol::expected_message_count(p) << " hmul=" << hmul
              << " expected_hmul=" << p - 1 << " outcome="
              << (report.outcome.found() ? std::to_string(*report.outcome.index) : "not found")
              << " oracle=" << t.match << "\n";
        }
        csv << n << ',' << p << ',' << args.backend << ',' << report.messages_paper << ','
            << report.messages_wire << ',' << report.bytes_up << ',' << report.bytes_down << ','
            << summary.build_ms << ',' << std::max(0.0, total_ms - summary.build_ms) << ','
            << hmul << "\n";
      }
    }
    csv.flush();
    if (deviations > 0) {
      err << deviations << " trial(s) deviated from the expected counts or outcome\n";
      return kExitRegression;
    }
    return 0;
  } catch (const Error& e) {
    return report_error(err, e);
  }
}

}  // namespace hesearch::cli
