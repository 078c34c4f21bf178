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

#ifndef HESEARCH_RANDOM_H_
#define HESEARCH_RANDOM_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace hesearch {

// ChaCha20 keystream generator. Seeded instances are reproducible; entropy
// instances draw their key from the operating system.
class Prng {
 public:
  static constexpr std::size_t kKeyBytes = 32;

  // Derives the stream key from (seed, domain) so that independent uses of
  // one seed never share a stream.
  static Prng from_seed(std::uint64_t seed, std::string_view domain);
  static Prng from_entropy();

  void fill(std::span<std::uint8_t> out);
  std::uint64_t next_u64();
  // Uniform in [0, bound); bound > 0.
  std::uint64_t uniform(std::uint64_t bound);

 private:
  explicit Prng(const std::array<std::uint8_t, kKeyBytes>& key);
  void refill();

  std::array<std::uint8_t, kKeyBytes> key_{};
  std::uint64_t block_ = 0;
  std::array<std::uint8_t, 4096> buffer_{};
  std::size_t pos_ = sizeof(buffer_);
};

}  // namespace hesearch

#endif  // HESEARCH_RANDOM_H_
