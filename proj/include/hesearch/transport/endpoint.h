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

#ifndef HESEARCH_TRANSPORT_ENDPOINT_H_
#define HESEARCH_TRANSPORT_ENDPOINT_H_

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>

#include "hesearch/bytes.h"
#include "hesearch/transport/stream.h"

namespace hesearch::transport {

inline constexpr std::size_t kDefaultMaxFrame = std::size_t{64} << 20;
inline constexpr std::chrono::milliseconds kDefaultTimeout{30000};

// kDefaultMaxFrame unless HESEARCH_MAX_FRAME holds a positive byte count.
std::size_t default_max_frame();

struct EndpointOptions {
  std::size_t max_frame = default_max_frame();
  std::chrono::milliseconds timeout = kDefaultTimeout;
};

enum class Role : std::uint8_t { kClient, kServer };

struct TrafficCounters {
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::uint64_t frames_sent = 0;
  std::uint64_t frames_received = 0;
};

// Length-prefixed framing over a byte stream: 4-byte big-endian payload
// length, then the payload. Byte counters include the length prefix.
class Endpoint {
 public:
  Endpoint(Role role, std::unique_ptr<ByteStream> stream, EndpointOptions options = {});

  Role role() const { return role_; }
  const EndpointOptions& options() const { return options_; }

  // Writes one frame as a single write; frames from concurrent callers never
  // interleave.
  void send_frame(ByteSpan payload);
  Bytes recv_frame();
  // Like recv_frame, but a clean close before the first length byte yields
  // nullopt instead of an error.
  std::optional<Bytes> try_recv_frame();

  TrafficCounters counters() const;
  std::string peer() const { return stream_->peer(); }
  void close();

 private:
  void read_exact(std::span<std::uint8_t> out, bool allow_clean_eof, bool& eof);

  Role role_;
  std::unique_ptr<ByteStream> stream_;
  EndpointOptions options_;
  std::mutex send_mutex_;
  std::mutex recv_mutex_;
  std::atomic<std::uint64_t> bytes_sent_{0};
  std::atomic<std::uint64_t> bytes_received_{0};
  std::atomic<std::uint64_t> frames_sent_{0};
  std::atomic<std::uint64_t> frames_received_{0};
};

}  // namespace hesearch::transport

#endif  // HESEARCH_TRANSPORT_ENDPOINT_H_
