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

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "hesearch/error.h"
#include "hesearch/transport/stream.h"

namespace hesearch::transport {
namespace {

std::string errno_text(std::string_view what) {
  return std::string(what) + ": " + std::strerror(errno);
}

int poll_one(int fd, short events, std::chrono::milliseconds timeout) {
  pollfd p{fd, events, 0};
  for (;;) {
    int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc >= 0) return rc;
    if (errno != EINTR) throw Error(ErrorCode::kIo, errno_text("poll"));
  }
}

std::string describe(const sockaddr_storage& addr) {
  char host[NI_MAXHOST];
  char port[NI_MAXSERV];
  if (::getnameinfo(reinterpret_cast<const sockaddr*>(&addr), sizeof(addr), host, sizeof(host),
                    port, sizeof(port), NI_NUMERICHOST | NI_NUMERICSERV) != 0) {
    return "unknown";
  }
  return std::string(host) + ":" + port;
}

class TcpStream final : public ByteStream {
 public:
  TcpStream(int fd, std::string peer) : fd_(fd), peer_(std::move(peer)) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  ~TcpStream() override { close(); }

  void write_all(ByteSpan bytes) override {
    if (fd_ < 0) throw Error(ErrorCode::kClosed, "socket closed");
    std::size_t sent = 0;
    while (sent < bytes.size()) {
      ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        if (errno == EPIPE || errno == ECONNRESET) {
          throw Error(ErrorCode::kClosed, "connection closed by peer");
        }
        throw Error(ErrorCode::kIo, errno_text("send"));
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  std::size_t read_some(std::span<std::uint8_t> out, std::chrono::milliseconds timeout) override {
    if (fd_ < 0) throw Error(ErrorCode::kClosed, "socket closed");
    if (poll_one(fd_, POLLIN, timeout) == 0) {
      throw Error(ErrorCode::kTimeout, "no data within " + std::to_string(timeout.count()) + " ms");
    }
    for (;;) {
      ssize_t n = ::recv(fd_, out.data(), out.size(), 0);
      if (n >= 0) return static_cast<std::size_t>(n);
      if (errno == EINTR) continue;
      if (errno == ECONNRESET) return 0;
      throw Error(ErrorCode::kIo, errno_text("recv"));
    }
  }

  void close() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

  std::string peer() const override { return peer_; }

 private:
  int fd_;
  std::string peer_;
};

struct AddrInfo {
  addrinfo* list = nullptr;
  ~AddrInfo() {
    if (list) ::freeaddrinfo(list);
  }
};

void resolve(const Address& address, bool passive, AddrInfo& out) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  std::string port = std::to_string(address.port);
  int rc = ::getaddrinfo(address.host.c_str(), port.c_str(), &hints, &out.list);
  if (rc != 0) {
    throw Error(ErrorCode::kIo, "cannot resolve '" + address.host + "': " + ::gai_strerror(rc));
  }
}

}  // namespace

std::unique_ptr<ByteStream> tcp_connect(const Address& address,
                                        std::chrono::milliseconds timeout) {
  AddrInfo info;
  resolve(address, false, info);
  std::string last_error = "no addresses";
  for (addrinfo* ai = info.list; ai; ai = ai->ai_next) {
    int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_NONBLOCK | SOCK_CLOEXEC,
                      ai->ai_protocol);
    if (fd < 0) {
      last_error = errno_text("socket");
      continue;
    }
    int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
    if (rc < 0 && errno == EINPROGRESS) {
      if (poll_one(fd, POLLOUT, timeout) == 0) {
        ::close(fd);
        throw Error(ErrorCode::kTimeout, "connect to " + address.host + " timed out");
      }
      int err = 0;
      socklen_t len = sizeof(err);
      ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
      errno = err;
      rc = err == 0 ? 0 : -1;
    }
    if (rc < 0) {
      last_error = errno_text("connect");
      ::close(fd);
      continue;
    }
    // Back to blocking mode; reads are bounded by poll.
    ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) & ~O_NONBLOCK);
    sockaddr_storage peer{};
    std::memcpy(&peer, ai->ai_addr, ai->ai_addrlen);
    return std::make_unique<TcpStream>(fd, describe(peer));
  }
  throw Error(ErrorCode::kIo, "cannot connect to " + address.host + ":" +
                                  std::to_string(address.port) + " (" + last_error + ")");
}

TcpListener::TcpListener(const Address& address) {
  AddrInfo info;
  resolve(address, true, info);
  std::string last_error = "no addresses";
  for (addrinfo* ai = info.list; ai; ai = ai->ai_next) {
    int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) {
      last_error = errno_text("socket");
      continue;
    }
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, ai->ai_addr, ai->ai_addrlen) < 0 || ::listen(fd, 64) < 0) {
      last_error = errno_text("bind");
      ::close(fd);
      continue;
    }
    sockaddr_storage bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = bound.ss_family == AF_INET6
                ? ntohs(reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port)
                : ntohs(reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
    fd_ = fd;
    return;
  }
  throw Error(ErrorCode::kIo, "cannot listen on " + address.host + ":" +
                                  std::to_string(address.port) + " (" + last_error + ")");
}

TcpListener::~TcpListener() { close(); }

void TcpListener::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

std::unique_ptr<ByteStream> TcpListener::accept(std::chrono::milliseconds timeout) {
  if (fd_ < 0) throw Error(ErrorCode::kClosed, "listener closed");
  if (poll_one(fd_, POLLIN, timeout) == 0) return nullptr;
  sockaddr_storage peer{};
  socklen_t len = sizeof(peer);
  int fd = ::accept4(fd_, reinterpret_cast<sockaddr*>(&peer), &len, SOCK_CLOEXEC);
  if (fd < 0) {
    if (errno == EINTR || errno == ECONNABORTED || errno == EAGAIN) return nullptr;
    throw Error(ErrorCode::kIo, errno_text("accept"));
  }
  return std::make_unique<TcpStream>(fd, describe(peer));
}

}  // namespace hesearch::transport
