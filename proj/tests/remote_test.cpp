#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "longvid/error.hpp"
#include "longvid/remote.hpp"

using namespace longvid;

namespace {

// Local HTTP server on an ephemeral port, stopped on destruction.
class LocalServer {
 public:
  LocalServer() {
    port_ = server.bind_to_any_port("127.0.0.1");
  }
  void start() {
    thread_ = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LocalServer() {
    server.stop();
    if (thread_.joinable()) thread_.join();
  }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

  httplib::Server server;

 private:
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST(Endpoint, Splits) {
  auto e = split_endpoint("https://api.example.com:8443/v1/chat/completions");
  EXPECT_EQ(e.base, "https://api.example.com:8443");
  EXPECT_EQ(e.path, "/v1/chat/completions");
  EXPECT_EQ(split_endpoint("http://h").path, "/");
  EXPECT_THROW(split_endpoint("no-scheme/x"), Error);
}

TEST(RemoteChat, RetriesServerErrorsThenSucceeds) {
  LocalServer srv;
  std::atomic<int> hits{0};
  std::string seen_auth, seen_body;
  srv.server.Post("/v1/chat", [&](const httplib::Request& req, httplib::Response& res) {
    if (++hits <= 2) {
      res.status = 500;
      return;
    }
    seen_auth = req.get_header_value("Authorization");
    seen_body = req.body;
    res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"hello"}}]})", "application/json");
  });
  srv.start();

  GatewayConfig cfg;
  cfg.max_retries = 3;
  LlmGateway gw(std::make_shared<RemoteChatBackend>(srv.url("/v1/chat"), "m1", 0.0, "k",
                                                    std::chrono::milliseconds(2000)),
                cfg);
  gw.set_sleeper([](auto) {});
  Conversation conv("s");
  conv.append(Role::System, "sys");
  EXPECT_EQ(gw.complete(conv, "hi"), "hello");
  EXPECT_EQ(hits.load(), 3);
  EXPECT_EQ(gw.attempts(), 3);
  EXPECT_EQ(seen_auth, "Bearer k");
  auto body = nlohmann::json::parse(seen_body);
  EXPECT_EQ(body["model"], "m1");
  ASSERT_EQ(body["messages"].size(), 2u);
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_EQ(body["messages"][1]["content"], "hi");
}

TEST(RemoteChat, ClientErrorIsNotRetried) {
  LocalServer srv;
  std::atomic<int> hits{0};
  srv.server.Post("/c", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 401;
  });
  srv.start();
  LlmGateway gw(std::make_shared<RemoteChatBackend>(srv.url("/c"), "m", 0.0, "", std::chrono::milliseconds(2000)),
                {});
  gw.set_sleeper([](auto) {});
  Conversation conv;
  try {
    gw.complete(conv, "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
  }
  EXPECT_EQ(hits.load(), 1);
}

TEST(RemoteTool, RoundTripsWireProtocol) {
  LocalServer srv;
  srv.server.Post("/tool", [&](const httplib::Request& req, httplib::Response& res) {
    auto cmd = decode_request(req.body);
    ToolReturn ret;
    ret.kind = cmd.kind;
    for (auto f = cmd.frame_range.start; f <= cmd.frame_range.end; ++f) {
      ret.detections.push_back({f, std::nullopt, {{"0", "cup", {1, 2, 3, 4}, 0.5}}});
    }
    res.set_content(encode_response(ret), "application/json");
  });
  srv.server.Post("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  srv.start();

  RemoteToolBackend tool(srv.url("/tool"), std::chrono::milliseconds(2000));
  ToolCommand cmd{ToolKind::Detect, {4, 6}, std::nullopt, ""};
  auto ret = tool.invoke(cmd);
  ASSERT_EQ(ret.detections.size(), 3u);
  EXPECT_EQ(ret.detections[2].frame_id, 6);
  EXPECT_EQ(ret.detections[0].detections[0].bbox, (BBox{1, 2, 3, 4}));

  RemoteToolBackend broken(srv.url("/broken"), std::chrono::milliseconds(2000));
  try {
    broken.invoke(cmd);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Transport);
  }
}
