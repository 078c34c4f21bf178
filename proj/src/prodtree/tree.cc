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

#include "hesearch/prodtree/tree.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

#include "hesearch/error.h"
#include "hesearch/he/serialization.h"

namespace hesearch::prodtree {
namespace {

// Runs body(i) for i in [0, count) on up to `threads` threads.
template <typename F>
void parallel_for(std::size_t count, std::size_t threads, F body) {
  threads = std::clamp<std::size_t>(threads, 1, count == 0 ? 1 : count);
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < count; i += threads) body(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void check_dataset(const he::Backend& backend, const Dataset& data) {
  if (data.items.empty()) throw Error(ErrorCode::kInvalidArgument, "dataset must be nonempty");
  if (data.params_id != backend.params_id()) {
    throw Error(ErrorCode::kParamsMismatch, "dataset is for '" + data.params_id +
                                                "', backend is '" + backend.params_id() + "'");
  }
  for (const auto& c : data.items) {
    if (c.empty() || c.backend() != backend.tag()) {
      throw Error(ErrorCode::kTagMismatch, "dataset mixes backends");
    }
  }
}

Bytes serialize_dataset(const Dataset& data) {
  ByteWriter w;
  w.raw(kDatasetMagic);
  w.str16(data.params_id);
  w.u32(static_cast<std::uint32_t>(data.items.size()));
  for (const auto& c : data.items) he::write_ciphertext(w, c);
  return std::move(w).take();
}

namespace {

std::string read_dataset_header(ByteReader& in) {
  ByteSpan magic = in.raw(kDatasetMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kDatasetMagic.begin())) {
    throw Error(ErrorCode::kMalformed, "not a dataset file (bad magic)");
  }
  return in.str16();
}

}  // namespace

std::string dataset_params_id(ByteSpan bytes) {
  ByteReader in(bytes);
  return read_dataset_header(in);
}

Dataset parse_dataset(const he::Backend& backend, ByteSpan bytes) {
  ByteReader in(bytes);
  Dataset data;
  data.params_id = read_dataset_header(in);
  if (data.params_id != backend.params_id()) {
    throw Error(ErrorCode::kParamsMismatch, "dataset is for '" + data.params_id +
                                                "', backend is '" + backend.params_id() + "'");
  }
  std::uint32_t count = in.u32();
  if (count == 0) throw Error(ErrorCode::kMalformed, "dataset must be nonempty");
  data.items.reserve(std::min<std::size_t>(count, in.remaining()));
  for (std::uint32_t i = 0; i < count; ++i) data.items.push_back(he::read_ciphertext(backend, in));
  in.expect_done("dataset file");
  return data;
}

std::size_t padded_size(std::size_t n) { return std::bit_ceil(std::max<std::size_t>(n, 1)); }

std::size_t tree_depth(std::size_t n) {
  return static_cast<std::size_t>(std::countr_zero(padded_size(n)));
}

std::size_t required_depth(std::size_t n, const BuildOptions& options) {
  std::size_t d = tree_depth(n);
  return d + (d > 0 && options.expected_gap != 1.0 ? 1 : 0);
}

std::vector<he::Ciphertext> pairwise_mul(const he::Backend& backend,
                                         std::span<const he::Ciphertext> level,
                                         const he::RelinKey& rlk, double gamma,
                                         std::size_t threads) {
  if (level.empty()) throw Error(ErrorCode::kInvalidArgument, "pairwise_mul of an empty level");
  const std::size_t pairs = level.size() / 2;
  std::vector<he::Ciphertext> out(pairs + level.size() % 2);
  parallel_for(pairs, threads, [&](std::size_t j) {
    he::Ciphertext product = backend.hmul(level[2 * j], level[2 * j + 1], rlk);
    if (gamma != 1.0) product = backend.hmul_plain(product, gamma);
    out[j] = std::move(product);
  });
  if (level.size() % 2 == 1) out.back() = level.back();
  return out;
}

CipherTree::CipherTree(std::vector<he::Ciphertext> nodes, std::size_t n_real)
    : nodes_(std::move(nodes)), n_real_(n_real) {
  if (nodes_.size() < 2 || !std::has_single_bit(nodes_.size())) {
    throw Error(ErrorCode::kInvalidArgument, "tree node vector must have length 2P");
  }
  n_padded_ = nodes_.size() / 2;
  depth_ = static_cast<std::size_t>(std::countr_zero(n_padded_));
  if (n_real_ < 1 || n_real_ > n_padded_) {
    throw Error(ErrorCode::kInvalidArgument, "n_real must be in [1, P]");
  }
}

const he::Ciphertext& CipherTree::node(std::size_t k) const {
  if (k < 1 || k >= nodes_.size()) {
    throw Error(ErrorCode::kOutOfRange, "node index " + std::to_string(k) + " out of range");
  }
  return nodes_[k];
}

std::pair<const he::Ciphertext&, const he::Ciphertext&> CipherTree::node_pair(
    std::uint64_t pivot) const {
  if (pivot < 1 || pivot >= n_padded_) {
    throw Error(ErrorCode::kOutOfRange, "pivot " + std::to_string(pivot) +
                                            " is not an internal node (P = " +
                                            std::to_string(n_padded_) + ")");
  }
  return {nodes_[2 * pivot], nodes_[2 * pivot + 1]};
}

std::optional<std::size_t> CipherTree::heap_to_index(std::uint64_t pivot) const {
  if (pivot < n_padded_ || pivot >= 2 * n_padded_) {
    throw Error(ErrorCode::kOutOfRange, "pivot " + std::to_string(pivot) + " is not a leaf");
  }
  std::size_t index = pivot - n_padded_;
  if (index >= n_real_) return std::nullopt;
  return index;
}

CipherTree build_tree(const he::Backend& backend, const Dataset& data,
                      const he::Ciphertext& target, const he::EvaluationKeys& keys,
                      const BuildOptions& options) {
  check_dataset(backend, data);
  if (target.empty() || target.backend() != backend.tag()) {
    throw Error(ErrorCode::kTagMismatch, "target does not belong to this backend");
  }
  if (!(options.expected_gap > 0) || !std::isfinite(options.expected_gap)) {
    throw Error(ErrorCode::kInvalidArgument, "expected gap must be positive and finite");
  }
  const std::size_t n = data.items.size();
  const std::size_t p = padded_size(n);
  const std::size_t needed = required_depth(n, options);
  if (needed > backend.remaining_depth(target)) {
    throw Error(ErrorCode::kDepthExhausted,
                "a tree over " + std::to_string(n) + " items needs depth " +
                    std::to_string(needed) + ", target has " +
                    std::to_string(backend.remaining_depth(target)));
  }

  std::vector<he::Ciphertext> nodes(2 * p);
  parallel_for(p, options.threads, [&](std::size_t i) {
    nodes[p + i] = i < n ? backend.hsub(data.items[i], target)
                         : backend.encrypt(keys.public_key, kPadValue);
  });

  const double first_gamma = 1.0 / (options.expected_gap * options.expected_gap);
  for (std::size_t width = p; width > 1; width /= 2) {
    std::span<const he::Ciphertext> level(nodes.data() + width, width);
    auto parents = pairwise_mul(backend, level, keys.relin_key,
                                width == p ? first_gamma : 1.0, options.threads);
    std::move(parents.begin(), parents.end(), nodes.begin() + static_cast<long>(width / 2));
  }
  return CipherTree(std::move(nodes), n);
}

}  // namespace hesearch::prodtree
