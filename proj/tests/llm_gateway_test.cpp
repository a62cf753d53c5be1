#include <gtest/gtest.h>

#include "longvid/error.hpp"
#include "longvid/llm_gateway.hpp"

using namespace longvid;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Io;
}

class Flaky final : public ChatBackend {
 public:
  Flaky(int failures, ErrorKind kind) : failures_(failures), kind_(kind) {}
  std::string reply(const std::vector<Turn>&) override {
    if (failures_-- > 0) throw Error(kind_, "flaky");
    return "ok";
  }

 private:
  int failures_;
  ErrorKind kind_;
};

}  // namespace

TEST(Scripted, RulesAndOrderedReplies) {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{"one", "two", "three"},
                                                   std::vector<ScriptedBackend::Rule>{{"summarize", "S1"}});
  LlmGateway gw(backend, {});
  Conversation conv("s");
  EXPECT_EQ(gw.complete(conv, "please summarize this"), "S1");
  EXPECT_EQ(gw.complete(conv, "q"), "one");
  EXPECT_EQ(gw.complete(conv, "summarize again"), "S1");
  EXPECT_EQ(gw.complete(conv, "q"), "two");
  EXPECT_EQ(gw.complete(conv, "q"), "three");
  EXPECT_EQ(conv.turns().size(), 10u);
  EXPECT_EQ(conv.turns()[1].role, Role::Assistant);
  EXPECT_EQ(kind_of([&] { gw.complete(conv, "q"); }), ErrorKind::ScriptExhausted);
  EXPECT_EQ(conv.turns().size(), 10u);
  EXPECT_EQ(backend->calls(), 6u);
  EXPECT_EQ(backend->remaining(), 0u);
}

TEST(Scripted, RuleMatchesOnlyNewestUserTurn) {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{"plain"},
                                                   std::vector<ScriptedBackend::Rule>{{"magic", "R"}});
  LlmGateway gw(backend, {});
  Conversation conv;
  EXPECT_EQ(gw.complete(conv, "magic"), "R");
  EXPECT_EQ(gw.complete(conv, "ordinary"), "plain");
}

TEST(Scripted, EmptyScriptFailsOnFirstCall) {
  LlmGateway gw(parse_script(""), {});
  Conversation conv;
  EXPECT_EQ(kind_of([&] { gw.complete(conv, "x"); }), ErrorKind::ScriptExhausted);
}

TEST(Scripted, ParsesFixtureFormat) {
  auto s = parse_script(
      "# leading comment\n\n"
      "@@ rule Given the captions\nsummary text\n\n"
      "@@ reply\nline one\nline two\n\n\n"
      "@@ reply\n\n  indented\n");
  LlmGateway gw(s, {});
  Conversation conv;
  EXPECT_EQ(gw.complete(conv, "x"), "line one\nline two");
  EXPECT_EQ(gw.complete(conv, "Given the captions, go"), "summary text");
  EXPECT_EQ(gw.complete(conv, "x"), "\n  indented");
  EXPECT_THROW(parse_script("stray\n@@ reply\nx\n"), Error);
  EXPECT_THROW(parse_script("@@ answer\nx\n"), Error);
  EXPECT_THROW(parse_script("@@ rule   \nx\n"), Error);
}

TEST(Gateway, RetriesTransportOnly) {
  std::vector<std::chrono::milliseconds> sleeps;
  GatewayConfig cfg;
  cfg.max_retries = 3;
  cfg.backoff_base = std::chrono::milliseconds(100);
  LlmGateway gw(std::make_shared<Flaky>(2, ErrorKind::Transport), cfg);
  gw.set_sleeper([&](std::chrono::milliseconds d) { sleeps.push_back(d); });
  Conversation conv("s");
  EXPECT_EQ(gw.complete(conv, "x"), "ok");
  EXPECT_EQ(gw.attempts(), 3);
  ASSERT_EQ(sleeps.size(), 2u);
  EXPECT_GE(sleeps[0].count(), 50);
  EXPECT_LE(sleeps[0].count(), 100);
  EXPECT_GE(sleeps[1].count(), 100);
  EXPECT_LE(sleeps[1].count(), 200);

  LlmGateway gw2(std::make_shared<Flaky>(2, ErrorKind::Transport), cfg);
  std::vector<std::chrono::milliseconds> again;
  gw2.set_sleeper([&](std::chrono::milliseconds d) { again.push_back(d); });
  Conversation conv2("s");
  gw2.complete(conv2, "x");
  EXPECT_EQ(again, sleeps);

  LlmGateway config_err(std::make_shared<Flaky>(1, ErrorKind::Config), cfg);
  config_err.set_sleeper([](auto) {});
  Conversation c3;
  EXPECT_EQ(kind_of([&] { config_err.complete(c3, "x"); }), ErrorKind::Config);
  EXPECT_EQ(config_err.attempts(), 1);

  cfg.max_retries = 1;
  LlmGateway gives_up(std::make_shared<Flaky>(5, ErrorKind::Transport), cfg);
  gives_up.set_sleeper([](auto) {});
  Conversation c4;
  EXPECT_EQ(kind_of([&] { gives_up.complete(c4, "x"); }), ErrorKind::Transport);
  EXPECT_EQ(gives_up.attempts(), 2);
  EXPECT_TRUE(c4.turns().empty());
}

TEST(Gateway, RejectsBadConfig) {
  GatewayConfig cfg;
  cfg.max_retries = -1;
  EXPECT_THROW(LlmGateway(std::make_shared<ScriptedBackend>(), cfg), Error);
  EXPECT_THROW(LlmGateway(nullptr, {}), Error);
}
