#include <gtest/gtest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <future>
#include <thread>

#include "onepress/detector.hpp"
#include "onepress/gateway.hpp"
#include "onepress/scenario.hpp"
#include "onepress/server.hpp"

using namespace onepress;

namespace {

std::shared_ptr<const GatewayFixtures> fixtures() {
  return std::make_shared<const GatewayFixtures>(GatewayFixtures::builtin());
}

std::string sample_msg(const ForceSample& s) {
  nlohmann::json j{{"type", "sample"}, {"key", s.key}, {"t_ms", s.t_ms}, {"force_n", s.force_n}};
  return j.dump();
}

std::vector<std::string> feed_all(GatewaySession& session, const std::vector<std::string>& lines) {
  std::vector<std::string> out;
  for (const auto& l : lines) {
    auto r = session.handle_line(l);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

std::string code_of(const std::string& line) { return nlohmann::json::parse(line).value("code", ""); }

Trace perfect_trace(int target, std::uint64_t seed = 3) {
  PressScript script;
  script.then(Segment::idle(200));
  append_attempt(script, Behavior::Perfect, target);
  SensorModel m;
  m.noise_sigma_n = 0.02;
  return synthesize_trace(script, m, seed);
}

std::vector<std::string> session_lines(const Trace& trace, const std::string& config) {
  std::vector<std::string> in{config};
  for (const auto& s : trace) in.push_back(sample_msg(s));
  in.push_back(R"({"type":"end"})");
  return in;
}

}  // namespace

TEST(GatewaySession, SamplesBeforeConfigAreRejected) {
  GatewaySession s(fixtures());
  const auto out = s.handle_line(sample_msg({0, "space", 0.0}));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(code_of(out[0]), "unconfigured");
  EXPECT_EQ(code_of(s.handle_line(R"({"type":"end"})")[0]), "unconfigured");
}

TEST(GatewaySession, MalformedAndUnknownMessages) {
  GatewaySession s(fixtures());
  EXPECT_EQ(code_of(s.handle_line("{oops")[0]), "malformed");
  EXPECT_EQ(code_of(s.handle_line("[1,2]")[0]), "malformed");
  EXPECT_EQ(code_of(s.handle_line(R"({"type":"dance"})")[0]), "unknown-type");
  EXPECT_EQ(code_of(s.handle_line(R"({"type":"config","menu":"nope"})")[0]), "unknown-menu");
  EXPECT_EQ(code_of(s.handle_line(R"({"type":"config","detector":{"bogus":1}})")[0]), "bad-config");
  EXPECT_EQ(code_of(s.handle_line(R"({"type":"config","wytiwyg":{"dwell_ms":-5}})")[0]), "bad-config");
  EXPECT_FALSE(s.configured());
  EXPECT_TRUE(s.handle_line(R"({"type":"config"})").empty());
  EXPECT_EQ(code_of(s.handle_line(R"({"type":"sample","key":"space","t_ms":"x","force_n":0})")[0]), "malformed");
  EXPECT_EQ(code_of(s.handle_line(R"({"type":"sample","key":"space","t_ms":0,"force_n":-1})")[0]), "bad-sample");
}

TEST(GatewaySession, NonMonotonicSampleIsReportedAndSkipped) {
  GatewaySession s(fixtures());
  s.handle_line(R"({"type":"config"})");
  EXPECT_TRUE(s.handle_line(sample_msg({10, "space", 0.0})).empty());
  const auto out = s.handle_line(sample_msg({10, "space", 0.0}));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(code_of(out[0]), "non-monotonic");
  EXPECT_TRUE(s.handle_line(sample_msg({20, "space", 0.0})).empty());
}

TEST(GatewaySession, PerfectAttemptCommitsItemEight) {
  GatewaySession s(fixtures());
  const auto out = feed_all(s, session_lines(perfect_trace(8), R"({"type":"config","menu":"numbered10"})"));
  const auto last = nlohmann::json::parse(out.back());
  EXPECT_EQ(last["type"], "state");
  EXPECT_EQ(last["phase"], "Committed");
  EXPECT_EQ(last["option"], "item-8");
  int commits = 0;
  for (const auto& l : out) {
    const auto j = nlohmann::json::parse(l);
    EXPECT_NE(j["type"], "error") << l;
    if (j["type"] == "directive" && j["kind"] == "CommitOutput") ++commits;
  }
  EXPECT_EQ(commits, 1);
}

TEST(GatewaySession, MatchesOfflineReplay) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto trace = perfect_trace(1 + static_cast<int>(seed % 10), seed);
    GatewaySession s(fixtures());
    const auto live = feed_all(s, session_lines(trace, R"({"type":"config"})"));
    EXPECT_EQ(live, replay_lines(detect(trace), suggest10_menu())) << "seed " << seed;
  }
}

TEST(GatewaySession, OtherKeysOnlyProduceEvents) {
  GatewaySession s(fixtures());
  const auto out = feed_all(s, session_lines(perfect_trace(3), R"({"type":"config","key":"f4"})"));
  for (const auto& l : out) EXPECT_NE(nlohmann::json::parse(l)["type"], "directive") << l;
  EXPECT_EQ(nlohmann::json::parse(out.back())["phase"], "Inactive");
}

// Socket transport.

namespace {

class Client {
 public:
  explicit Client(std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) throw std::runtime_error("connect");
  }
  ~Client() { ::close(fd_); }

  void send(const std::string& text) {
    std::size_t sent = 0;
    while (sent < text.size()) {
      const auto n = ::send(fd_, text.data() + sent, text.size() - sent, MSG_NOSIGNAL);
      if (n <= 0) throw std::runtime_error("send");
      sent += static_cast<std::size_t>(n);
    }
  }

  // Reads lines until one has "type":"state".
  std::vector<std::string> read_until_state() {
    std::vector<std::string> lines;
    char chunk[4096];
    for (;;) {
      for (auto nl = buf_.find('\n'); nl != std::string::npos; nl = buf_.find('\n')) {
        lines.push_back(buf_.substr(0, nl));
        buf_.erase(0, nl + 1);
        if (nlohmann::json::parse(lines.back())["type"] == "state") return lines;
      }
      const auto n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n <= 0) throw std::runtime_error("connection closed");
      buf_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_ = -1;
  std::string buf_;
};

}  // namespace

TEST(GatewayServer, ConcurrentClientsGetIndependentSessions) {
  GatewayServer server(fixtures(), "127.0.0.1", 0);
  std::thread loop([&] { server.serve(); });

  auto run_client = [&](int target, std::uint64_t seed) {
    const auto trace = perfect_trace(target, seed);
    Client c(server.port());
    std::string payload;
    for (const auto& l : session_lines(trace, R"({"type":"config","menu":"numbered10"})")) payload += l + "\n";
    c.send(payload);
    return std::pair{c.read_until_state(), replay_lines(detect(trace), MenuModel::numbered(10, "numbered10"))};
  };
  auto a = std::async(std::launch::async, run_client, 8, 1);
  auto b = std::async(std::launch::async, run_client, 3, 2);
  const auto [got_a, want_a] = a.get();
  const auto [got_b, want_b] = b.get();
  EXPECT_EQ(got_a, want_a);
  EXPECT_EQ(got_b, want_b);
  EXPECT_EQ(nlohmann::json::parse(got_a.back())["option"], "item-8");
  EXPECT_EQ(nlohmann::json::parse(got_b.back())["option"], "item-3");

  server.stop();
  loop.join();
}

TEST(GatewayServer, CrLfFramingAndBadHost) {
  GatewayServer server(fixtures(), "127.0.0.1", 0);
  std::thread loop([&] { server.serve(); });
  {
    Client c(server.port());
    c.send("{\"type\":\"config\"}\r\n\r\n{\"type\":\"end\"}\r\n");
    const auto lines = c.read_until_state();
    ASSERT_EQ(lines.size(), 1u);
    EXPECT_EQ(nlohmann::json::parse(lines[0])["phase"], "Inactive");
  }
  server.stop();
  loop.join();
  EXPECT_THROW(GatewayServer(fixtures(), "not-an-ip", 0), std::runtime_error);
}
