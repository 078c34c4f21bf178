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

#include <algorithm>
#include <charconv>
#include <condition_variable>
#include <deque>
#include <mutex>

#include "hesearch/error.h"
#include "hesearch/transport/stream.h"

namespace hesearch::transport {
namespace {

// One direction of an in-process pipe.
struct Channel {
  std::mutex mutex;
  std::condition_variable ready;
  std::deque<std::uint8_t> data;
  bool closed = false;
};

class PipeStream final : public ByteStream {
 public:
  PipeStream(std::shared_ptr<Channel> in, std::shared_ptr<Channel> out, std::string name)
      : in_(std::move(in)), out_(std::move(out)), name_(std::move(name)) {}
  ~PipeStream() override { close(); }

  void write_all(ByteSpan bytes) override {
    std::lock_guard lock(out_->mutex);
    if (out_->closed) throw Error(ErrorCode::kClosed, "pipe closed");
    out_->data.insert(out_->data.end(), bytes.begin(), bytes.end());
    out_->ready.notify_all();
  }

  std::size_t read_some(std::span<std::uint8_t> out, std::chrono::milliseconds timeout) override {
    std::unique_lock lock(in_->mutex);
    if (!in_->ready.wait_for(lock, timeout, [&] { return !in_->data.empty() || in_->closed; })) {
      throw Error(ErrorCode::kTimeout, "no data within " + std::to_string(timeout.count()) + " ms");
    }
    std::size_t n = std::min(out.size(), in_->data.size());
    std::copy_n(in_->data.begin(), n, out.begin());
    in_->data.erase(in_->data.begin(), in_->data.begin() + static_cast<long>(n));
    return n;
  }

  void close() override {
    for (auto* channel : {in_.get(), out_.get()}) {
      std::lock_guard lock(channel->mutex);
      channel->closed = true;
      channel->ready.notify_all();
    }
  }

  std::string peer() const override { return name_; }

 private:
  std::shared_ptr<Channel> in_;
  std::shared_ptr<Channel> out_;
  std::string name_;
};

class FragmentingStream final : public ByteStream {
 public:
  explicit FragmentingStream(std::unique_ptr<ByteStream> inner) : inner_(std::move(inner)) {}

  void write_all(ByteSpan bytes) override {
    for (std::size_t i = 0; i < bytes.size(); ++i) inner_->write_all(bytes.subspan(i, 1));
  }
  std::size_t read_some(std::span<std::uint8_t> out, std::chrono::milliseconds timeout) override {
    if (out.empty()) return 0;
    return inner_->read_some(out.first(1), timeout);
  }
  void close() override { inner_->close(); }
  std::string peer() const override { return inner_->peer(); }

 private:
  std::unique_ptr<ByteStream> inner_;
};

}  // namespace

std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_pipe() {
  auto a_to_b = std::make_shared<Channel>();
  auto b_to_a = std::make_shared<Channel>();
  return {std::make_unique<PipeStream>(b_to_a, a_to_b, "pipe:b"),
          std::make_unique<PipeStream>(a_to_b, b_to_a, "pipe:a")};
}

std::unique_ptr<ByteStream> make_fragmenting(std::unique_ptr<ByteStream> inner) {
  return std::make_unique<FragmentingStream>(std::move(inner));
}

Address parse_address(const std::string& text) {
  Address out;
  auto colon = text.rfind(':');
  std::string host = colon == std::string::npos ? text : text.substr(0, colon);
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
    host = host.substr(1, host.size() - 2);
  }
  out.host = host.empty() ? "127.0.0.1" : host;
  if (colon != std::string::npos) {
    std::string_view port(text.data() + colon + 1, text.size() - colon - 1);
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc() || ptr != port.data() + port.size() || value > 65535) {
      throw Error(ErrorCode::kInvalidArgument, "bad port in address '" + text + "'");
    }
    out.port = static_cast<std::uint16_t>(value);
  }
  return out;
}

}  // namespace hesearch::transport
