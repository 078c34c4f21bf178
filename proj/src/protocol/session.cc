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

#include "hesearch/protocol/session.h"

#include <bit>
#include <chrono>
#include <cmath>

#include "hesearch/error.h"

namespace hesearch::protocol {

std::uint64_t expected_message_count(std::size_t n_padded) {
  if (n_padded == 0 || !std::has_single_bit(n_padded)) {
    throw Error(ErrorCode::kInvalidArgument, "n_padded must be a power of two");
  }
  return 1 + 2 * static_cast<std::uint64_t>(std::countr_zero(n_padded));
}

ServerSession::ServerSession(std::shared_ptr<const he::Backend> backend,
                             std::shared_ptr<const prodtree::Dataset> data,
                             he::EvaluationKeys keys, prodtree::BuildOptions options)
    : backend_(std::move(backend)),
      data_(std::move(data)),
      keys_(std::move(keys)),
      options_(options) {
  prodtree::check_dataset(*backend_, *data_);
}

std::optional<Message> ServerSession::on_message(const Message& m) {
  const MessageTag tag = tag_of(m);
  switch (state_) {
    case State::kAwaitingRequest:
      if (tag == MessageTag::kSearchRequest) {
        const auto start = std::chrono::steady_clock::now();
        tree_ = prodtree::build_tree(*backend_, *data_, std::get<SearchRequest>(m).target, keys_,
                                     options_);
        build_ms_ = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                              start)
                        .count();
        state_ = tree_->n_padded() == 1 ? State::kDone : State::kServing;
        ++messages_paper_;
        return Root{tree_->n_real(), tree_->root()};
      }
      break;
    case State::kServing:
      if (tag == MessageTag::kDescend) {
        const std::uint64_t pivot = std::get<Descend>(m).pivot;
        if (pivot < 1 || pivot >= tree_->n_padded()) {
          throw Error(ErrorCode::kProtocol, "pivot " + std::to_string(pivot) +
                                                " is not an internal node of a tree with " +
                                                std::to_string(tree_->n_padded()) + " leaves");
        }
        auto [left, right] = tree_->node_pair(pivot);
        ++messages_paper_;  // the Descend
        ++messages_paper_;  // the Children reply
        if (2 * pivot >= tree_->n_padded()) state_ = State::kDone;
        return Children{left, right};
      }
      if (tag == MessageTag::kNotFound) {
        state_ = State::kDone;
        return std::nullopt;
      }
      break;
    case State::kDone:
      break;
  }
  throw Error(ErrorCode::kProtocol, std::string("unexpected ") + std::string(tag_name(tag)) +
                                        " message in state " +
                                        (state_ == State::kAwaitingRequest ? "awaiting-request"
                                         : state_ == State::kServing       ? "serving"
                                                                           : "done"));
}

std::vector<Bytes> ServerSession::reachable_key_material() const {
  return {keys_.public_key.bytes(), keys_.relin_key.bytes()};
}

std::string_view mode_name(Mode mode) { return mode == Mode::kStrict ? "strict" : "robust"; }

ClientOptions default_client_options(he::BackendTag backend) {
  if (backend == he::BackendTag::kPlain) return {kExactZero, Mode::kStrict};
  return {1e-4, Mode::kRobust};
}

ClientSession::ClientSession(const he::Backend& backend, he::SecretKey sk, ClientOptions options)
    : backend_(backend), sk_(std::move(sk)), options_(options) {
  if (!(options_.epsilon > 0) || !std::isfinite(options_.epsilon)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive and finite");
  }
}

Message ClientSession::start(he::Ciphertext target) {
  if (started_) throw Error(ErrorCode::kProtocol, "session already started");
  started_ = true;
  return SearchRequest{std::move(target)};
}

std::optional<Message> ClientSession::farewell() const {
  if (done_ && n_padded_ > 1 && pivots_.empty()) return NotFound{};
  return std::nullopt;
}

bool ClientSession::is_zero(const he::Ciphertext& c) const {
  return std::fabs(backend_.decrypt(sk_, c)) < options_.epsilon;
}

std::variant<Message, SearchOutcome> ClientSession::descend_to(std::uint64_t pivot) {
  pivot_ = pivot;
  pivots_.push_back(pivot);
  if (pivot >= n_padded_) {
    done_ = true;
    const std::uint64_t index = pivot - n_padded_;
    if (index >= n_real_) return SearchOutcome{};
    return SearchOutcome{static_cast<std::size_t>(index)};
  }
  ++messages_paper_;  // the Descend about to be sent
  return Descend{pivot};
}

std::variant<Message, SearchOutcome> ClientSession::on_message(const Message& m) {
  if (!started_ || done_) throw Error(ErrorCode::kProtocol, "session is not expecting messages");
  if (const auto* error = std::get_if<ErrorMessage>(&m)) {
    done_ = true;
    throw Error(error->code, "server: " + error->detail);
  }
  if (const auto* root = std::get_if<Root>(&m)) {
    if (n_padded_ != 0) throw Error(ErrorCode::kProtocol, "duplicate Root message");
    if (root->n_real == 0 || root->n_real > (std::uint64_t{1} << 40)) {
      throw Error(ErrorCode::kProtocol, "implausible dataset size in Root");
    }
    ++messages_paper_;
    n_real_ = static_cast<std::size_t>(root->n_real);
    n_padded_ = prodtree::padded_size(n_real_);
    if (!is_zero(root->node)) {
      done_ = true;
      return SearchOutcome{};
    }
    if (n_padded_ == 1) {
      done_ = true;
      pivots_.push_back(1);
      return SearchOutcome{0};
    }
    return descend_to(1);
  }
  if (const auto* children = std::get_if<Children>(&m)) {
    if (n_padded_ == 0 || pivot_ == 0) {
      throw Error(ErrorCode::kProtocol, "Children before Root");
    }
    ++messages_paper_;
    const std::uint64_t left = 2 * pivot_;
    if (options_.mode == Mode::kStrict) {
      return descend_to(is_zero(children->left) ? left : left + 1);
    }
    if (is_zero(children->left)) return descend_to(left);
    if (is_zero(children->right)) return descend_to(left + 1);
    done_ = true;
    throw Error(ErrorCode::kInconsistency,
                "neither child of node " + std::to_string(pivot_) +
                    " decrypts below epsilon although the node did");
  }
  throw Error(ErrorCode::kProtocol,
              std::string("unexpected ") + std::string(tag_name(tag_of(m))) + " message");
}

}  // namespace hesearch::protocol
