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

#ifndef HESEARCH_PROTOCOL_SESSION_H_
#define HESEARCH_PROTOCOL_SESSION_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "hesearch/he/backend.h"
#include "hesearch/prodtree/tree.h"
#include "hesearch/protocol/message.h"

namespace hesearch::protocol {

// Messages counted by the 1 + 2d formula: Root, every Descend and every
// Children. The SearchRequest is counted separately.
std::uint64_t expected_message_count(std::size_t n_padded);

// Server side of one search. Holds only evaluation keys; it has no way to
// decrypt anything it builds or sends.
class ServerSession {
 public:
  enum class State : std::uint8_t { kAwaitingRequest, kServing, kDone };

  ServerSession(std::shared_ptr<const he::Backend> backend,
                std::shared_ptr<const prodtree::Dataset> data, he::EvaluationKeys keys,
                prodtree::BuildOptions options = {});

  State state() const { return state_; }
  // Replies to one client message; nullopt when no reply is due. Throws
  // Error(kProtocol) for messages the current state does not accept.
  std::optional<Message> on_message(const Message& m);

  const prodtree::CipherTree* tree() const { return tree_ ? &*tree_ : nullptr; }
  std::uint64_t messages_paper() const { return messages_paper_; }
  std::size_t n_real() const { return data_->items.size(); }
  double build_ms() const { return build_ms_; }

  // Serialized form of every key this session can reach.
  std::vector<Bytes> reachable_key_material() const;

 private:
  std::shared_ptr<const he::Backend> backend_;
  std::shared_ptr<const prodtree::Dataset> data_;
  he::EvaluationKeys keys_;
  prodtree::BuildOptions options_;
  State state_ = State::kAwaitingRequest;
  std::optional<prodtree::CipherTree> tree_;
  std::uint64_t messages_paper_ = 0;
  double build_ms_ = 0;
};

enum class Mode : std::uint8_t { kStrict, kRobust };

std::string_view mode_name(Mode mode);

// Threshold that accepts only an exact zero: the plain backend never rounds a
// nonzero value to 0, so every nonzero decryption is at least this large.
inline constexpr double kExactZero = std::numeric_limits<double>::denorm_min();

struct ClientOptions {
  double epsilon = kExactZero;
  Mode mode = Mode::kStrict;
};

// Defaults: exact-zero semantics in strict mode on the plain backend,
// epsilon 1e-4 in robust mode otherwise.
ClientOptions default_client_options(he::BackendTag backend);

struct SearchOutcome {
  std::optional<std::size_t> index;
  bool found() const { return index.has_value(); }
  friend bool operator==(const SearchOutcome&, const SearchOutcome&) = default;
};

// Client side of one search.
class ClientSession {
 public:
  ClientSession(const he::Backend& backend, he::SecretKey sk, ClientOptions options);

  Message start(he::Ciphertext target);
  // The next message to send, or the final outcome. Throws
  // Error(kInconsistency) in robust mode when neither child is zero.
  std::variant<Message, SearchOutcome> on_message(const Message& m);

  // NotFound when the root ruled out a match while the server still expects
  // a Descend; sent so the server can end the session cleanly. Not part of
  // messages_paper.
  std::optional<Message> farewell() const;

  const std::vector<std::uint64_t>& pivots() const { return pivots_; }
  std::uint64_t messages_paper() const { return messages_paper_; }
  std::size_t n_padded() const { return n_padded_; }
  bool done() const { return done_; }

 private:
  bool is_zero(const he::Ciphertext& c) const;
  std::variant<Message, SearchOutcome> descend_to(std::uint64_t pivot);

  const he::Backend& backend_;
  he::SecretKey sk_;
  ClientOptions options_;
  bool started_ = false;
  bool done_ = false;
  std::size_t n_real_ = 0;
  std::size_t n_padded_ = 0;
  std::uint64_t pivot_ = 0;
  std::vector<std::uint64_t> pivots_;
  std::uint64_t messages_paper_ = 0;
};

}  // namespace hesearch::protocol

#endif  // HESEARCH_PROTOCOL_SESSION_H_
