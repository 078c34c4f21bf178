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
#include <chrono>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "gtest/gtest.h"
#include "hesearch/error.h"
#include "hesearch/he/plain_backend.h"
#include "hesearch/he/registry.h"
#include "hesearch/he/serialization.h"
#include "hesearch/protocol/driver.h"
#include "hesearch/protocol/message.h"
#include "hesearch/protocol/session.h"

namespace hesearch::protocol {
namespace {

using namespace std::chrono_literals;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

// Leftmost index of target, the reference answer for every search.
std::optional<std::size_t> oracle(const std::vector<double>& values, double target) {
  auto it = std::find(values.begin(), values.end(), target);
  if (it == values.end()) return std::nullopt;
  return static_cast<std::size_t>(it - values.begin());
}

std::size_t log2_size(std::size_t p) { return static_cast<std::size_t>(std::countr_zero(p)); }

// Plain backend setup shared by most tests. The server gets its own backend
// instance so its counters show exactly what the server did.
struct PlainWorld {
  std::shared_ptr<he::Backend> server_backend = he::make_backend("plain");
  std::unique_ptr<he::Backend> client_backend = he::make_backend("plain");
  he::KeyPair keys = client_backend->keygen(11);

  std::shared_ptr<const prodtree::Dataset> dataset(const std::vector<double>& values) const {
    auto data = std::make_shared<prodtree::Dataset>();
    data->params_id = client_backend->params_id();
    for (double v : values) data->items.push_back(client_backend->encrypt(keys.public_key, v));
    return data;
  }
  he::Ciphertext enc(double v) const { return client_backend->encrypt(keys.public_key, v); }
};

struct LocalResult {
  SearchOutcome outcome;
  std::uint64_t client_messages = 0;
  std::uint64_t server_messages = 0;
  std::vector<std::uint64_t> pivots;
  ServerSession::State server_state{};
};

// Drives both sessions directly, passing every message through the codec.
LocalResult run_local(const PlainWorld& w, const std::vector<double>& values, double target,
                      ClientOptions options = {}) {
  ServerSession server(w.server_backend, w.dataset(values), he::EvaluationKeys::from(w.keys));
  ClientSession client(*w.client_backend, w.keys.secret_key, options);
  auto relay = [&](const Message& m, const he::Backend& b) {
    return decode_message(b, encode_message(m));
  };
  Message next = client.start(w.enc(target));
  LocalResult result;
  for (;;) {
    auto reply = server.on_message(relay(next, *w.server_backend));
    EXPECT_TRUE(reply.has_value());
    auto step = client.on_message(relay(*reply, *w.client_backend));
    if (auto* outcome = std::get_if<SearchOutcome>(&step)) {
      result.outcome = *outcome;
      break;
    }
    next = std::get<Message>(step);
  }
  if (auto bye = client.farewell()) {
    EXPECT_FALSE(server.on_message(*bye).has_value());
  }
  result.client_messages = client.messages_paper();
  result.server_messages = server.messages_paper();
  result.pivots = client.pivots();
  result.server_state = server.state();
  return result;
}

TEST(CodecTest, RoundTripsEveryMessage) {
  PlainWorld w;
  const he::Backend& b = *w.client_backend;
  auto value = [&](const he::Ciphertext& c) { return b.decrypt(w.keys.secret_key, c); };

  auto req = std::get<SearchRequest>(decode_message(b, encode_message(SearchRequest{w.enc(3)})));
  EXPECT_EQ(value(req.target), 3.0);
  auto root = std::get<Root>(decode_message(b, encode_message(Root{7, w.enc(-2)})));
  EXPECT_EQ(root.n_real, 7u);
  EXPECT_EQ(value(root.node), -2.0);
  auto kids = std::get<Children>(decode_message(b, encode_message(Children{w.enc(1), w.enc(0)})));
  EXPECT_EQ(value(kids.left), 1.0);
  EXPECT_EQ(value(kids.right), 0.0);
  EXPECT_EQ(std::get<Descend>(decode_message(b, encode_message(Descend{5}))).pivot, 5u);
  EXPECT_TRUE(std::holds_alternative<NotFound>(decode_message(b, encode_message(NotFound{}))));
  auto err = std::get<ErrorMessage>(
      decode_message(b, encode_message(ErrorMessage{ErrorCode::kDepthExhausted, "too deep"})));
  EXPECT_EQ(err.code, ErrorCode::kDepthExhausted);
  EXPECT_EQ(err.detail, "too deep");
}

TEST(CodecTest, ByteLayout) {
  EXPECT_EQ(encode_message(Descend{0x0102}), (Bytes{2, 0, 0, 0, 0, 0, 0, 1, 2}));
  EXPECT_EQ(encode_message(NotFound{}), (Bytes{4}));
  EXPECT_EQ(encode_message(ErrorMessage{ErrorCode::kProtocol, "x"}),
            (Bytes{255, 0, static_cast<std::uint8_t>(ErrorCode::kProtocol), 'x'}));
  PlainWorld w;
  he::Ciphertext c = w.enc(1.0);
  Bytes root = encode_message(Root{3, c});
  Bytes envelope = he::serialize_ciphertext(c);
  ASSERT_EQ(root.size(), 1 + 8 + envelope.size());
  EXPECT_EQ(root[0], 1);
  EXPECT_EQ(root[8], 3);
  EXPECT_TRUE(std::equal(envelope.begin(), envelope.end(), root.begin() + 9));
  for (MessageTag tag : {MessageTag::kSearchRequest, MessageTag::kRoot, MessageTag::kDescend,
                         MessageTag::kChildren, MessageTag::kNotFound, MessageTag::kError}) {
    EXPECT_FALSE(tag_name(tag).empty());
  }
}

TEST(CodecTest, RejectsMalformedMessages) {
  PlainWorld w;
  const he::Backend& b = *w.client_backend;
  EXPECT_EQ(code_of([&] { decode_message(b, Bytes{}); }), ErrorCode::kMalformed);
  EXPECT_EQ(code_of([&] { decode_message(b, Bytes{9}); }), ErrorCode::kMalformed);
  EXPECT_EQ(code_of([&] { decode_message(b, Bytes{2, 0, 0}); }), ErrorCode::kMalformed);
  EXPECT_EQ(code_of([&] { decode_message(b, Bytes{4, 0}); }), ErrorCode::kMalformed);
  Bytes kids = encode_message(Children{w.enc(1), w.enc(2)});
  kids.pop_back();
  EXPECT_EQ(code_of([&] { decode_message(b, kids); }), ErrorCode::kMalformed);
  auto err = std::get<ErrorMessage>(decode_message(b, Bytes{255, 0x7F, 0x00}));
  EXPECT_EQ(err.code, ErrorCode::kProtocol);
  auto toy = he::make_backend("toy-insecure");
  EXPECT_EQ(code_of([&] { decode_message(*toy, encode_message(SearchRequest{w.enc(1)})); }),
            ErrorCode::kTagMismatch);
}

TEST(SessionTest, ExpectedMessageCount) {
  EXPECT_EQ(expected_message_count(1), 1u);
  EXPECT_EQ(expected_message_count(2), 3u);
  EXPECT_EQ(expected_message_count(4), 5u);
  EXPECT_EQ(expected_message_count(1024), 21u);
  EXPECT_EQ(code_of([] { expected_message_count(6); }), ErrorCode::kInvalidArgument);
}

TEST(SessionTest, ExamplesFromTheProtocol) {
  PlainWorld w;
  LocalResult hit = run_local(w, {5, 3, 7, 3}, 7);
  EXPECT_EQ(hit.outcome.index, 2u);
  EXPECT_EQ(hit.pivots, (std::vector<std::uint64_t>{1, 3, 6}));
  EXPECT_EQ(hit.client_messages, 5u);
  EXPECT_EQ(hit.server_messages, 5u);
  EXPECT_EQ(hit.server_state, ServerSession::State::kDone);

  LocalResult leftmost = run_local(w, {5, 3, 7, 3}, 3);
  EXPECT_EQ(leftmost.outcome.index, 1u);
  EXPECT_EQ(leftmost.pivots, (std::vector<std::uint64_t>{1, 2, 5}));

  LocalResult miss = run_local(w, {1, 2, 3}, 9);
  EXPECT_FALSE(miss.outcome.found());
  EXPECT_EQ(miss.client_messages, 1u);
  EXPECT_EQ(miss.server_state, ServerSession::State::kDone);
}

TEST(SessionTest, SingleItemDataset) {
  PlainWorld w;
  LocalResult hit = run_local(w, {4}, 4);
  EXPECT_EQ(hit.outcome.index, 0u);
  EXPECT_EQ(hit.client_messages, 1u);
  EXPECT_EQ(hit.server_messages, 1u);
  LocalResult miss = run_local(w, {4}, 5);
  EXPECT_FALSE(miss.outcome.found());
  EXPECT_EQ(miss.client_messages, 1u);
}

TEST(SessionTest, TinyNonzeroProductsAreNotMatches) {
  PlainWorld w;
  // (-0.5)^37 is about -7e-12, far below any fixed threshold but not zero.
  LocalResult r = run_local(w, std::vector<double>(37, 2.5), 3.0);
  EXPECT_FALSE(r.outcome.found());
  std::vector<double> values(1024, 1e-3);
  values[700] = 0;
  EXPECT_EQ(run_local(w, values, 0).outcome.index, 700u);
  EXPECT_FALSE(run_local(w, std::vector<double>(1024, 1e-3), 0).outcome.found());
}

TEST(SessionTest, DuplicatesEverywhereYieldIndexZero) {
  PlainWorld w;
  for (std::size_t n : {2, 3, 8, 33}) {
    LocalResult r = run_local(w, std::vector<double>(n, 6.0), 6.0);
    EXPECT_EQ(r.outcome.index, 0u) << n;
    EXPECT_EQ(r.client_messages, expected_message_count(prodtree::padded_size(n))) << n;
  }
}

TEST(SessionTest, MatchInLastSlotOfPaddedTree) {
  PlainWorld w;
  std::vector<double> values = {1, 2, 3, 4, 5};
  LocalResult r = run_local(w, values, 5);
  EXPECT_EQ(r.outcome.index, 4u);
  EXPECT_EQ(r.client_messages, 7u);
}

TEST(SessionTest, MessageCountsAcrossSizes) {
  PlainWorld w;
  for (std::size_t n = 2; n <= 1024; n = n < 40 ? n + 1 : n * 2 - 3) {
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = static_cast<double>(i);
    double target = static_cast<double>(n / 3);
    LocalResult r = run_local(w, values, target);
    ASSERT_EQ(r.outcome.index, n / 3) << n;
    const std::size_t p = prodtree::padded_size(n);
    EXPECT_EQ(r.client_messages, 1 + 2 * log2_size(p)) << n;
    EXPECT_EQ(r.server_messages, r.client_messages) << n;
    EXPECT_EQ(r.pivots.size(), log2_size(p) + 1) << n;  // internal nodes, then the leaf
  }
}

TEST(SessionTest, RandomTrialsMatchOracle) {
  PlainWorld w;
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 1 + rng() % 100;
    std::vector<double> values(n);
    for (double& v : values) v = static_cast<double>(static_cast<int>(rng() % 21) - 10);
    double target = static_cast<double>(static_cast<int>(rng() % 21) - 10);
    LocalResult r = run_local(w, values, target);
    ASSERT_EQ(r.outcome.index, oracle(values, target)) << trial;
    // Each pivot is a child of the previous one.
    for (std::size_t i = 1; i < r.pivots.size(); ++i) {
      EXPECT_EQ(r.pivots[i] / 2, r.pivots[i - 1]);
    }
  }
}

TEST(ServerSessionTest, StateGuards) {
  PlainWorld w;
  auto data = w.dataset({1, 2, 3, 4});
  auto eval = he::EvaluationKeys::from(w.keys);
  {
    ServerSession s(w.server_backend, data, eval);
    EXPECT_EQ(code_of([&] { s.on_message(Descend{1}); }), ErrorCode::kProtocol);
    EXPECT_EQ(code_of([&] { s.on_message(NotFound{}); }), ErrorCode::kProtocol);
  }
  {
    ServerSession s(w.server_backend, data, eval);
    EXPECT_EQ(s.state(), ServerSession::State::kAwaitingRequest);
    ASSERT_TRUE(s.on_message(SearchRequest{w.enc(2)}));
    EXPECT_EQ(s.state(), ServerSession::State::kServing);
    EXPECT_EQ(code_of([&] { s.on_message(SearchRequest{w.enc(2)}); }), ErrorCode::kProtocol);
    EXPECT_EQ(code_of([&] { s.on_message(Descend{0}); }), ErrorCode::kProtocol);
    EXPECT_EQ(code_of([&] { s.on_message(Descend{4}); }), ErrorCode::kProtocol);
    EXPECT_TRUE(s.on_message(Descend{1}));
    EXPECT_EQ(s.state(), ServerSession::State::kServing);
    EXPECT_TRUE(s.on_message(Descend{2}));
    EXPECT_EQ(s.state(), ServerSession::State::kDone);
    EXPECT_EQ(code_of([&] { s.on_message(Descend{1}); }), ErrorCode::kProtocol);
    EXPECT_EQ(s.messages_paper(), 5u);
  }
  {
    ServerSession s(w.server_backend, data, eval);
    s.on_message(SearchRequest{w.enc(9)});
    EXPECT_FALSE(s.on_message(NotFound{}).has_value());
    EXPECT_EQ(s.state(), ServerSession::State::kDone);
  }
  {
    ServerSession s(w.server_backend, w.dataset({8}), eval);
    s.on_message(SearchRequest{w.enc(8)});
    EXPECT_EQ(s.state(), ServerSession::State::kDone);
  }
  auto empty = std::make_shared<prodtree::Dataset>();
  empty->params_id = "plain";
  EXPECT_EQ(code_of([&] { ServerSession(w.server_backend, empty, eval); }),
            ErrorCode::kInvalidArgument);
}

TEST(ServerSessionTest, ServerNeverDecryptsOrHoldsTheSecretKey) {
  PlainWorld w;
  std::vector<double> values = {4, 8, 15, 16, 23, 42};
  ServerSession server(w.server_backend, w.dataset(values), he::EvaluationKeys::from(w.keys));
  ClientSession client(*w.client_backend, w.keys.secret_key, {});
  w.server_backend->reset_counts();
  Message next = client.start(w.enc(23));
  for (;;) {
    auto step = client.on_message(*server.on_message(next));
    if (std::holds_alternative<SearchOutcome>(step)) break;
    next = std::get<Message>(step);
  }
  EXPECT_EQ(w.server_backend->counts().decrypt, 0u);
  EXPECT_GT(w.server_backend->counts().hmul, 0u);
  const Bytes secret = w.keys.secret_key.bytes();
  for (const Bytes& blob : server.reachable_key_material()) {
    EXPECT_NE(blob, secret);
    EXPECT_EQ(std::search(blob.begin(), blob.end(), secret.begin(), secret.end()), blob.end());
  }
}

TEST(ServerSessionTest, CkksServerKeyMaterialExcludesSecret) {
  std::shared_ptr<he::Backend> toy = he::make_backend("toy-insecure");
  he::KeyPair keys = toy->keygen(4);
  auto data = std::make_shared<prodtree::Dataset>();
  data->params_id = toy->params_id();
  data->items.push_back(toy->encrypt(keys.public_key, 1));
  ServerSession server(toy, data, he::EvaluationKeys::from(keys));
  const Bytes secret = keys.secret_key.bytes();
  for (const Bytes& blob : server.reachable_key_material()) {
    EXPECT_EQ(std::search(blob.begin(), blob.end(), secret.begin(), secret.end()), blob.end());
  }
}

TEST(ClientSessionTest, Guards) {
  PlainWorld w;
  ClientSession c(*w.client_backend, w.keys.secret_key, {});
  EXPECT_EQ(code_of([&] { c.on_message(Root{1, w.enc(0)}); }), ErrorCode::kProtocol);
  c.start(w.enc(1));
  EXPECT_EQ(code_of([&] { c.start(w.enc(1)); }), ErrorCode::kProtocol);
  EXPECT_EQ(code_of([&] { c.on_message(Children{w.enc(0), w.enc(1)}); }), ErrorCode::kProtocol);
  EXPECT_EQ(code_of([&] { c.on_message(Root{0, w.enc(0)}); }), ErrorCode::kProtocol);
  EXPECT_EQ(code_of([&] { c.on_message(Descend{1}); }), ErrorCode::kProtocol);
  auto step = c.on_message(Root{4, w.enc(0)});
  EXPECT_EQ(std::get<Descend>(std::get<Message>(step)).pivot, 1u);
  EXPECT_EQ(code_of([&] { c.on_message(Root{4, w.enc(0)}); }), ErrorCode::kProtocol);
  EXPECT_EQ(code_of([&] { c.on_message(ErrorMessage{ErrorCode::kDepthExhausted, "x"}); }),
            ErrorCode::kDepthExhausted);
  EXPECT_TRUE(c.done());
  EXPECT_EQ(code_of([] {
              PlainWorld v;
              ClientSession(*v.client_backend, v.keys.secret_key, {0.0, Mode::kStrict});
            }),
            ErrorCode::kInvalidArgument);
}

TEST(ClientSessionTest, FarewellOnlyAfterRootRejection) {
  PlainWorld w;
  ClientSession reject(*w.client_backend, w.keys.secret_key, {});
  reject.start(w.enc(1));
  EXPECT_FALSE(std::get<SearchOutcome>(reject.on_message(Root{4, w.enc(3)})).found());
  EXPECT_TRUE(reject.farewell().has_value());
  ClientSession single(*w.client_backend, w.keys.secret_key, {});
  single.start(w.enc(1));
  single.on_message(Root{1, w.enc(3)});
  EXPECT_FALSE(single.farewell().has_value());
}

TEST(ClientSessionTest, StrictAndRobustChildSelection) {
  PlainWorld w;
  auto drive = [&](Mode mode, double left, double right) {
    ClientSession c(*w.client_backend, w.keys.secret_key, {1e-9, mode});
    c.start(w.enc(0));
    c.on_message(Root{2, w.enc(0)});
    return c.on_message(Children{w.enc(left), w.enc(right)});
  };
  // Left wins whenever it is zero.
  EXPECT_EQ(std::get<SearchOutcome>(drive(Mode::kStrict, 0, 0)).index, 0u);
  EXPECT_EQ(std::get<SearchOutcome>(drive(Mode::kRobust, 0, 0)).index, 0u);
  EXPECT_EQ(std::get<SearchOutcome>(drive(Mode::kRobust, 2, 0)).index, 1u);
  // Strict mode trusts the parent and goes right without looking.
  EXPECT_EQ(std::get<SearchOutcome>(drive(Mode::kStrict, 2, 5)).index, 1u);
  EXPECT_EQ(code_of([&] { drive(Mode::kRobust, 2, 5); }), ErrorCode::kInconsistency);
  // A padding leaf selected in strict mode is reported as not found.
  ClientSession c(*w.client_backend, w.keys.secret_key, {1e-9, Mode::kStrict});
  c.start(w.enc(0));
  c.on_message(Root{1 + 2, w.enc(0)});
  c.on_message(Children{w.enc(3), w.enc(0)});
  EXPECT_FALSE(std::get<SearchOutcome>(c.on_message(Children{w.enc(1), w.enc(1)})).found());
}

TEST(ClientSessionTest, DefaultOptions) {
  EXPECT_EQ(default_client_options(he::BackendTag::kPlain).mode, Mode::kStrict);
  EXPECT_EQ(default_client_options(he::BackendTag::kPlain).epsilon, kExactZero);
  EXPECT_EQ(default_client_options(he::BackendTag::kCkks).mode, Mode::kRobust);
  EXPECT_EQ(default_client_options(he::BackendTag::kCkks).epsilon, 1e-4);
  EXPECT_EQ(mode_name(Mode::kRobust), "robust");
}

// End-to-end runs over every transport.
enum class Kind { kPipe, kFragmenting, kTcp };

std::string kind_name(const ::testing::TestParamInfo<Kind>& info) {
  switch (info.param) {
    case Kind::kPipe:
      return "Pipe";
    case Kind::kFragmenting:
      return "Fragmenting";
    case Kind::kTcp:
      return "Tcp";
  }
  return "Unknown";
}

std::pair<std::unique_ptr<transport::ByteStream>, std::unique_ptr<transport::ByteStream>>
connect(Kind kind) {
  if (kind == Kind::kTcp) {
    transport::TcpListener listener(transport::Address{"127.0.0.1", 0});
    auto client = transport::tcp_connect(transport::Address{"127.0.0.1", listener.port()}, 2s);
    auto server = listener.accept(2s);
    return {std::move(client), std::move(server)};
  }
  auto [a, b] = transport::make_pipe();
  if (kind == Kind::kFragmenting) {
    return {transport::make_fragmenting(std::move(a)), transport::make_fragmenting(std::move(b))};
  }
  return {std::move(a), std::move(b)};
}

struct WireResult {
  SearchReport report;
  SessionSummary summary;
};

WireResult run_wire(Kind kind, const std::shared_ptr<he::Backend>& server_backend,
                    const he::Backend& client_backend, const he::KeyPair& keys,
                    std::shared_ptr<const prodtree::Dataset> data, const he::Ciphertext& target,
                    ClientOptions options) {
  auto [a, b] = connect(kind);
  WireResult out;
  std::jthread server([&, stream = std::move(b)]() mutable {
    transport::Endpoint endpoint(transport::Role::kServer, std::move(stream));
    ServerSession session(server_backend, data, he::EvaluationKeys::from(keys));
    out.summary = serve_connection(endpoint, *server_backend, session);
  });
  transport::Endpoint endpoint(transport::Role::kClient, std::move(a));
  out.report = run_search(endpoint, client_backend, target, keys.secret_key, options);
  server.join();
  return out;
}

class WireTest : public ::testing::TestWithParam<Kind> {};

TEST_P(WireTest, RandomSearchesMatchOracle) {
  PlainWorld w;
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()) + 1);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t n = 1 + rng() % 64;
    std::vector<double> values(n);
    for (double& v : values) v = static_cast<double>(static_cast<int>(rng() % 15) - 7);
    double target = static_cast<double>(static_cast<int>(rng() % 15) - 7);
    WireResult r = run_wire(GetParam(), w.server_backend, *w.client_backend, w.keys,
                            w.dataset(values), w.enc(target), {});
    ASSERT_EQ(r.report.outcome.index, oracle(values, target)) << trial;
    const std::size_t p = prodtree::padded_size(n);
    EXPECT_EQ(r.report.n_padded, p);
    if (r.report.outcome.found()) {
      EXPECT_EQ(r.report.messages_paper, expected_message_count(p));
    }
    EXPECT_EQ(r.report.messages_wire, r.report.messages_paper + 1);
    EXPECT_EQ(r.summary.end, "done");
    EXPECT_EQ(r.summary.messages_paper, r.report.messages_paper);
    // The closing NotFound after a root rejection is 5 bytes the report omits.
    const bool farewell = !r.report.outcome.found() && p > 1;
    EXPECT_EQ(r.summary.traffic.bytes_received, r.report.bytes_up + (farewell ? 5 : 0));
    EXPECT_EQ(r.summary.traffic.bytes_sent, r.report.bytes_down);
  }
}

TEST_P(WireTest, CkksSearch) {
  std::shared_ptr<he::Backend> toy = he::make_backend("toy-insecure");
  he::KeyPair keys = toy->keygen(8);
  auto data = std::make_shared<prodtree::Dataset>();
  data->params_id = toy->params_id();
  std::vector<double> values = {5, 3, 7, 3};
  for (double v : values) data->items.push_back(toy->encrypt(keys.public_key, v));
  for (double target : {7.0, 3.0, 5.0, 4.0}) {
    WireResult r = run_wire(GetParam(), toy, *toy, keys, data,
                            toy->encrypt(keys.public_key, target),
                            default_client_options(toy->tag()));
    EXPECT_EQ(r.report.outcome.index, oracle(values, target)) << target;
    EXPECT_EQ(r.summary.end, "done");
  }
}

TEST_P(WireTest, ServerReportsProtocolErrors) {
  PlainWorld w;
  auto [a, b] = connect(GetParam());
  SessionSummary summary;
  std::jthread server([&, stream = std::move(b)]() mutable {
    transport::Endpoint endpoint(transport::Role::kServer, std::move(stream));
    ServerSession session(w.server_backend, w.dataset({1, 2, 3}),
                          he::EvaluationKeys::from(w.keys));
    summary = serve_connection(endpoint, *w.server_backend, session);
  });
  transport::Endpoint client(transport::Role::kClient, std::move(a));
  client.send_frame(encode_message(Descend{1}));
  auto reply = decode_message(*w.client_backend, client.recv_frame());
  ASSERT_TRUE(std::holds_alternative<ErrorMessage>(reply));
  EXPECT_EQ(std::get<ErrorMessage>(reply).code, ErrorCode::kProtocol);
  server.join();
  EXPECT_EQ(summary.end, "error:protocol-error");
}

TEST_P(WireTest, ServerReportsDepthExhaustion) {
  std::shared_ptr<he::Backend> toy = he::make_backend("toy-insecure");
  he::KeyPair keys = toy->keygen(8);
  auto data = std::make_shared<prodtree::Dataset>();
  data->params_id = toy->params_id();
  for (int i = 0; i < 5; ++i) data->items.push_back(toy->encrypt(keys.public_key, i));
  ClientOptions options = default_client_options(toy->tag());
  EXPECT_EQ(code_of([&] {
              run_wire(GetParam(), toy, *toy, keys, data, toy->encrypt(keys.public_key, 1),
                       options);
            }),
            ErrorCode::kDepthExhausted);
}

TEST_P(WireTest, ClientHangUpIsReportedAsClosed) {
  PlainWorld w;
  auto [a, b] = connect(GetParam());
  SessionSummary summary;
  std::jthread server([&, stream = std::move(b)]() mutable {
    transport::Endpoint endpoint(transport::Role::kServer, std::move(stream));
    ServerSession session(w.server_backend, w.dataset({1, 2}), he::EvaluationKeys::from(w.keys));
    summary = serve_connection(endpoint, *w.server_backend, session);
  });
  a->close();
  server.join();
  EXPECT_EQ(summary.end, "closed");
}

INSTANTIATE_TEST_SUITE_P(Transports, WireTest,
                         ::testing::Values(Kind::kPipe, Kind::kFragmenting, Kind::kTcp),
                         kind_name);

TEST(ServerTest, ConcurrentClientsOverTcp) {
  PlainWorld w;
  std::vector<double> values = {9, 1, 4, 1, 5, 9, 2, 6};
  Server server(w.server_backend, w.dataset(values), he::EvaluationKeys::from(w.keys));
  transport::TcpListener listener(transport::Address{"127.0.0.1", 0});
  std::stop_source stop;
  std::vector<SessionSummary> summaries;
  std::jthread loop([&] {
    server.run(listener, stop.get_token(),
               [&](const SessionSummary& s) { summaries.push_back(s); });
  });
  std::vector<std::optional<std::size_t>> got(6);
  {
    std::vector<std::jthread> clients;
    for (std::size_t i = 0; i < got.size(); ++i) {
      clients.emplace_back([&, i] {
        auto stream = transport::tcp_connect({"127.0.0.1", listener.port()}, 2s);
        transport::Endpoint endpoint(transport::Role::kClient, std::move(stream));
        got[i] = run_search(endpoint, *w.client_backend, w.enc(static_cast<double>(i + 1)),
                            w.keys.secret_key, {})
                     .outcome.index;
      });
    }
  }
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i], oracle(values, static_cast<double>(i + 1))) << i;
  }
  // Sessions report after the client sees its outcome; wait for the last one.
  auto deadline = std::chrono::steady_clock::now() + 5s;
  while (std::chrono::steady_clock::now() < deadline) {
    if (w.server_backend->counts().hmul >= 6 * 7) break;
    std::this_thread::sleep_for(10ms);
  }
  stop.request_stop();
  loop.join();
  ASSERT_EQ(summaries.size(), got.size());
  std::vector<std::uint64_t> ids;
  for (const auto& s : summaries) {
    EXPECT_EQ(s.end, "done");
    EXPECT_EQ(s.n_real, values.size());
    ids.push_back(s.id);
  }
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(std::unique(ids.begin(), ids.end()), ids.end());
  EXPECT_EQ(w.server_backend->counts().decrypt, 0u);
}

}  // namespace
}  // namespace hesearch::protocol
