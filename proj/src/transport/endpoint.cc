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

#include "hesearch/transport/endpoint.h"

#include <charconv>
#include <cstdlib>
#include <cstring>

#include "hesearch/error.h"

namespace hesearch::transport {

std::size_t default_max_frame() {
  const char* env = std::getenv("HESEARCH_MAX_FRAME");
  if (env == nullptr || *env == '\0') return kDefaultMaxFrame;
  std::size_t value = 0;
  const char* end = env + std::strlen(env);
  auto [ptr, ec] = std::from_chars(env, end, value);
  if (ec != std::errc() || ptr != end || value == 0 || value > 0xFFFFFFFFu) {
    return kDefaultMaxFrame;
  }
  return value;
}

Endpoint::Endpoint(Role role, std::unique_ptr<ByteStream> stream, EndpointOptions options)
    : role_(role), stream_(std::move(stream)), options_(options) {
  if (!stream_) throw Error(ErrorCode::kInvalidArgument, "endpoint needs a stream");
}

void Endpoint::send_frame(ByteSpan payload) {
  if (payload.size() > options_.max_frame) {
    throw Error(ErrorCode::kOversize, "frame of " + std::to_string(payload.size()) +
                                          " bytes exceeds limit " +
                                          std::to_string(options_.max_frame));
  }
  ByteWriter w;
  w.reserve(4 + payload.size());
  w.u32(static_cast<std::uint32_t>(payload.size()));
  w.raw(payload);
  std::lock_guard lock(send_mutex_);
  stream_->write_all(w.bytes());
  bytes_sent_ += w.size();
  frames_sent_ += 1;
}

void Endpoint::read_exact(std::span<std::uint8_t> out, bool allow_clean_eof, bool& eof) {
  std::size_t got = 0;
  while (got < out.size()) {
    std::size_t n = stream_->read_some(out.subspan(got), options_.timeout);
    if (n == 0) {
      if (got == 0 && allow_clean_eof) {
        eof = true;
        return;
      }
      throw Error(ErrorCode::kTruncated, "stream ended after " + std::to_string(got) + " of " +
                                             std::to_string(out.size()) + " bytes");
    }
    got += n;
    bytes_received_ += n;
  }
}

std::optional<Bytes> Endpoint::try_recv_frame() {
  std::lock_guard lock(recv_mutex_);
  std::uint8_t header[4];
  bool eof = false;
  read_exact(header, true, eof);
  if (eof) return std::nullopt;
  const std::uint32_t length = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
                               (std::uint32_t{header[2]} << 8) | std::uint32_t{header[3]};
  if (length > options_.max_frame) {
    stream_->close();
    throw Error(ErrorCode::kOversize, "declared frame length " + std::to_string(length) +
                                          " exceeds limit " + std::to_string(options_.max_frame));
  }
  Bytes payload(length);
  read_exact(payload, false, eof);
  frames_received_ += 1;
  return payload;
}

Bytes Endpoint::recv_frame() {
  auto frame = try_recv_frame();
  if (!frame) throw Error(ErrorCode::kClosed, "connection closed by peer");
  return std::move(*frame);
}

TrafficCounters Endpoint::counters() const {
  return {bytes_sent_.load(), bytes_received_.load(), frames_sent_.load(),
          frames_received_.load()};
}

void Endpoint::close() { stream_->close(); }

}  // namespace hesearch::transport
