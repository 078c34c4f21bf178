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

#include <csignal>
#include <iostream>
#include <stop_token>
#include <thread>

#include "CLI11.hpp"
#include "hesearch/cli/commands.h"

namespace {

using hesearch::cli::kExitError;

// Blocks SIGINT and SIGTERM in every thread and turns their arrival into a
// stop request.
class SignalStop {
 public:
  SignalStop() {
    sigemptyset(&set_);
    sigaddset(&set_, SIGINT);
    sigaddset(&set_, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set_, nullptr);
    waiter_ = std::jthread([this] {
      int sig = 0;
      sigwait(&set_, &sig);
      source_.request_stop();
    });
  }
  ~SignalStop() {
    if (!source_.stop_requested()) pthread_kill(waiter_.native_handle(), SIGTERM);
  }
  std::stop_token token() const { return source_.get_token(); }

 private:
  sigset_t set_;
  std::stop_source source_;
  std::jthread waiter_;
};

}  // namespace

int main(int argc, char** argv) {
  namespace cli = hesearch::cli;
  CLI::App app{"Encrypted membership search over a homomorphic product tree"};
  app.require_subcommand(1);

  cli::KeygenArgs keygen;
  auto* keygen_cmd = app.add_subcommand("keygen", "Generate a key file and its public-only twin");
  keygen_cmd->add_option("--preset", keygen.preset, "Parameter preset")->required();
  keygen_cmd->add_option("--out", keygen.out, "Key file path; the public part goes to <out>.pub")
      ->required();
  keygen_cmd->add_option("--seed", keygen.seed, "Deterministic key seed");

  cli::EncryptArgs encrypt;
  auto* encrypt_cmd = app.add_subcommand("encrypt", "Encrypt a CSV of values into a dataset file");
  encrypt_cmd->add_option("values", encrypt.values, "One decimal per line, '-' for stdin")
      ->required();
  encrypt_cmd->add_option("--public-keys", encrypt.public_keys, "Key file")->required();
  encrypt_cmd->add_option("--out", encrypt.out, "Dataset file to write")->required();

  cli::ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Serve searches over an encrypted dataset");
  serve_cmd->add_option("--data", serve.data, "Dataset file")->required();
  serve_cmd->add_option("--public-keys", serve.public_keys, "Public key file")->required();
  serve_cmd->add_option("--listen", serve.listen, "host:port to listen on")
      ->capture_default_str();
  serve_cmd->add_option("--gap", serve.expected_gap,
                        "Expected non-match difference; != 1 normalizes the first level")
      ->capture_default_str();
  serve_cmd->add_option("--threads", serve.threads, "Threads per tree build")
      ->capture_default_str();
  serve_cmd->add_option("--max-sessions", serve.max_sessions, "Exit after this many sessions");

  cli::SearchArgs search;
  auto* search_cmd = app.add_subcommand("search", "Look up an encrypted target on a server");
  search_cmd->add_option("target", search.target, "Value to search for")->required();
  search_cmd->add_option("--connect", search.connect, "Server host:port")->capture_default_str();
  search_cmd->add_option("--keys", search.keys, "Key file with the secret key")->required();
  search_cmd->add_option("--epsilon", search.epsilon, "Zero threshold");
  search_cmd->add_option("--mode", search.mode, "strict or robust")
      ->check(CLI::IsMember({"strict", "robust"}));
  search_cmd->add_flag("--stats", search.stats, "Print message and byte counters to stderr");
  search_cmd->add_option("--timeout", search.timeout_s, "Seconds to wait for each reply")
      ->capture_default_str();

  cli::BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Measure searches and check the count formulas");
  bench_cmd->add_option("--backend", bench.backend, "Preset name")->capture_default_str();
  bench_cmd->add_option("--n", bench.n, "Comma-separated dataset sizes")
      ->delimiter(',')
      ->required();
  bench_cmd->add_option("--trials", bench.trials, "Trials per size")->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "CSV output path (default stdout)");
  bench_cmd->add_option("--seed", bench.seed, "Seed for keys and data")->capture_default_str();
  bench_cmd->add_option("--gap", bench.expected_gap, "Expected non-match difference")
      ->capture_default_str();
  bench_cmd->add_option("--epsilon", bench.epsilon, "Client zero threshold");
  bench_cmd->add_option("--mode", bench.mode, "strict or robust")
      ->check(CLI::IsMember({"strict", "robust"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  if (*keygen_cmd) return cli::cmd_keygen(keygen, std::cout, std::cerr);
  if (*encrypt_cmd) return cli::cmd_encrypt(encrypt, std::cout, std::cerr);
  if (*search_cmd) return cli::cmd_search(search, std::cout, std::cerr);
  if (*bench_cmd) return cli::cmd_bench(bench, std::cout, std::cerr);
  SignalStop signals;
  return cli::cmd_serve(serve, std::cout, std::cerr, signals.token());
}
