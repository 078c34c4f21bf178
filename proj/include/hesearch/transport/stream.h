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

#ifndef HESEARCH_TRANSPORT_STREAM_H_
#define HESEARCH_TRANSPORT_STREAM_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>

#include "hesearch/bytes.h"

namespace hesearch::transport {

inline constexpr std::uint16_t kDefaultPort = 7341;

// A bidirectional byte stream. Reads may return fewer bytes than asked.
class ByteStream {
 public:
  virtual ~ByteStream() = default;

  virtual void write_all(ByteSpan bytes) = 0;
  // Returns 0 once the peer has closed and all data is consumed. Throws
  // Error(kTimeout) if nothing arrives within `timeout`.
  virtual std::size_t read_some(std::span<std::uint8_t> out,
                                std::chrono::milliseconds timeout) = 0;
  virtual void close() = 0;
  virtual std::string peer() const = 0;
};

// Connected in-process stream pair.
std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_pipe();

// Forwards to `inner` one byte per write and read call.
std::unique_ptr<ByteStream> make_fragmenting(std::unique_ptr<ByteStream> inner);

struct Address {
  std::string host;
  std::uint16_t port = kDefaultPort;
};

// Parses "host:port", "host" or ":port".
Address parse_address(const std::string& text);

std::unique_ptr<ByteStream> tcp_connect(const Address& address,
                                        std::chrono::milliseconds timeout);

class TcpListener {
 public:
  // Binds and listens; port 0 picks an ephemeral port.
  explicit TcpListener(const Address& address);
  ~TcpListener();

  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  // Waits up to `timeout` for a connection; nullptr when none arrived.
  std::unique_ptr<ByteStream> accept(std::chrono::milliseconds timeout);
  void close();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace hesearch::transport

#endif  // HESEARCH_TRANSPORT_STREAM_H_
