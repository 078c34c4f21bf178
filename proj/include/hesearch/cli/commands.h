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

#ifndef HESEARCH_CLI_COMMANDS_H_
#define HESEARCH_CLI_COMMANDS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

namespace hesearch::cli {

enum ExitCode : int {
  kExitFound = 0,
  kExitNotFound = 1,
  kExitError = 2,
  kExitRegression = 3,
};

inline constexpr std::string_view kBenchHeader =
    "n,n_padded,backend,messages_paper,messages_wire,bytes_up,bytes_down,build_ms,search_ms,"
    "hmul_count";

// One decimal per line, blank lines ignored. Throws Error(kMalformed) naming
// the 1-based line of the first bad entry.
std::vector<double> parse_values(std::string_view text);

struct KeygenArgs {
  std::string preset;
  std::string out;
  std::optional<std::uint64_t> seed;
};

struct EncryptArgs {
  std::string values;  // path, or "-" for standard input
  std::string public_keys;
  std::string out;
};

struct ServeArgs {
  std::string data;
  std::string public_keys;
  std::string listen = "127.0.0.1:7341";
  double expected_gap = 1.0;
  std::size_t threads = 1;
  // Stop after this many sessions; unlimited when unset.
  std::optional<std::size_t> max_sessions;
};

struct SearchArgs {
  double target = 0;
  std::string connect = "127.0.0.1:7341";
  std::string keys;
  std::optional<double> epsilon;
  std::optional<std::string> mode;
  bool stats = false;
  double timeout_s = 30;
};

struct BenchArgs {
  std::string backend = "plain";
  std::vector<std::size_t> n;
  std::size_t trials = 1;
  std::string out;  // empty: standard output
  std::uint64_t seed = 1;
  double expected_gap = 1.0;
  // Client overrides; backend defaults when unset.
  std::optional<double> epsilon;
  std::optional<std::string> mode;
};

int cmd_keygen(const KeygenArgs& args, std::ostream& out, std::ostream& err);
int cmd_encrypt(const EncryptArgs& args, std::ostream& out, std::ostream& err);
int cmd_serve(const ServeArgs& args, std::ostream& out, std::ostream& err, std::stop_token stop);
int cmd_search(const SearchArgs& args, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);

}  // namespace hesearch::cli

#endif  // HESEARCH_CLI_COMMANDS_H_
