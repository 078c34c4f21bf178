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

#ifndef HESEARCH_PRODTREE_TREE_H_
#define HESEARCH_PRODTREE_TREE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hesearch/bytes.h"
#include "hesearch/he/backend.h"

namespace hesearch::prodtree {

inline constexpr std::string_view kDatasetMagic = "HSD1";
// Plaintext of the padding leaves.
inline constexpr double kPadValue = 1.0;

// Encrypted dataset in its original order.
struct Dataset {
  std::string params_id;
  std::vector<he::Ciphertext> items;
};

// Throws unless the dataset is nonempty and every item belongs to `backend`.
void check_dataset(const he::Backend& backend, const Dataset& data);

// Dataset file: magic | params-id (u16 length) | count u32 | envelopes.
Bytes serialize_dataset(const Dataset& data);
Dataset parse_dataset(const he::Backend& backend, ByteSpan bytes);
// Params-id of a dataset file without parsing the ciphertexts.
std::string dataset_params_id(ByteSpan bytes);

// Smallest power of two >= n, and its log2.
std::size_t padded_size(std::size_t n);
std::size_t tree_depth(std::size_t n);

struct BuildOptions {
  // Expected magnitude of a non-matching difference. Values other than 1
  // scale the first product level by 1 / gap^2, which costs one extra level
  // on leveled backends.
  double expected_gap = 1.0;
  std::size_t threads = 1;
};

// Multiplicative depth a build over n items needs.
std::size_t required_depth(std::size_t n, const BuildOptions& options);

// Products of consecutive pairs, each times `gamma` when gamma != 1. A
// trailing odd element is passed through unchanged.
std::vector<he::Ciphertext> pairwise_mul(const he::Backend& backend,
                                         std::span<const he::Ciphertext> level,
                                         const he::RelinKey& rlk, double gamma = 1.0,
                                         std::size_t threads = 1);

// Perfect binary product tree in heap layout: nodes[1] is the root, node k
// has children 2k and 2k+1, and leaves occupy [P, 2P).
class CipherTree {
 public:
  CipherTree(std::vector<he::Ciphertext> nodes, std::size_t n_real);

  std::size_t depth() const { return depth_; }
  std::size_t n_real() const { return n_real_; }
  std::size_t n_padded() const { return n_padded_; }
  std::size_t leaf_offset() const { return n_padded_; }
  const std::vector<he::Ciphertext>& nodes() const { return nodes_; }
  const he::Ciphertext& node(std::size_t k) const;
  const he::Ciphertext& root() const { return nodes_[1]; }

  // Children of an internal node, 1 <= pivot < P.
  std::pair<const he::Ciphertext&, const he::Ciphertext&> node_pair(std::uint64_t pivot) const;
  // Dataset position of a leaf, or nullopt for a padding leaf.
  std::optional<std::size_t> heap_to_index(std::uint64_t pivot) const;

 private:
  std::vector<he::Ciphertext> nodes_;
  std::size_t n_real_;
  std::size_t n_padded_;
  std::size_t depth_;
};

// Leaves c_i - target in dataset order, padded with fresh encryptions of 1,
// then one product level at a time up to the root.
CipherTree build_tree(const he::Backend& backend, const Dataset& data,
                      const he::Ciphertext& target, const he::EvaluationKeys& keys,
                      const BuildOptions& options = {});

}  // namespace hesearch::prodtree

#endif  // HESEARCH_PRODTREE_TREE_H_
