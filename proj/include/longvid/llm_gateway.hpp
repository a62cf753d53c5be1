#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace longvid {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);

struct Turn {
  Role role = Role::User;
  std::string text;

  bool operator==(const Turn&) const = default;
};

/// One chat thread. Turns are append-only.
class Conversation {
 public:
  explicit Conversation(std::string session_id = {}) : session_id_(std::move(session_id)) {}

  const std::string& session_id() const { return session_id_; }
  const std::vector<Turn>& turns() const { return turns_; }
  void append(Role role, std::string text) { turns_.push_back({role, std::move(text)}); }

 private:
  std::string session_id_;
  std::vector<Turn> turns_;
};

/// A chat model. `reply` sees the full thread, including the newest user turn.
/// Transport problems are reported as Error{Transport}; anything else is not
/// retried by the gateway.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string reply(const std::vector<Turn>& turns) = 0;
};

enum class BackendKind { Remote, Scripted };

struct GatewayConfig {
  BackendKind backend = BackendKind::Scripted;
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o";
  double temperature = 0.0;
  int max_retries = 3;
  std::chrono::milliseconds timeout{60000};
  std::chrono::milliseconds backoff_base{500};
  std::uint64_t seed = 0;
};

/// Uniform completion interface over any ChatBackend, with retry and jittered
/// exponential backoff on transport errors.
class LlmGateway {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  LlmGateway(std::shared_ptr<ChatBackend> backend, GatewayConfig config);

  /// Appends `user_turn` and the reply to `conv` and returns the reply. On
  /// failure `conv` is left unchanged.
  std::string complete(Conversation& conv, std::string user_turn);

  void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }
  const GatewayConfig& config() const { return config_; }
  /// Backend calls made so far, including failed ones.
  int attempts() const { return attempts_.load(); }

 private:
  std::shared_ptr<ChatBackend> backend_;
  GatewayConfig config_;
  Sleeper sleeper_;
  std::atomic<int> attempts_{0};
};

/// Deterministic backend for tests and fixture-driven runs. Matcher rules are
/// checked first against the newest user turn (first matching rule wins and is
/// not consumed); otherwise the next ordered reply is consumed exactly once.
class ScriptedBackend final : public ChatBackend {
 public:
  struct Rule {
    std::string contains;
    std::string reply;
  };

  ScriptedBackend() = default;
  ScriptedBackend(std::vector<std::string> ordered, std::vector<Rule> rules = {});

  std::string reply(const std::vector<Turn>& turns) override;

  std::size_t remaining() const;
  std::size_t calls() const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> ordered_;
  std::vector<Rule> rules_;
  std::size_t next_ = 0;
  std::size_t calls_ = 0;
};

/// Fixture format:
///   # comment
///   @@ reply
///   <reply text, any number of lines>
///   @@ rule <substring>
///   <reply text>
/// Each block runs to the next "@@" line; the final newline of a block is not
/// part of the reply.
std::shared_ptr<ScriptedBackend> parse_script(const std::string& text);
std::shared_ptr<ScriptedBackend> script_from_fixture(const std::filesystem::path& path);

/// Backend driven by a callable; handy for programmatic test LLMs.
class FunctionBackend final : public ChatBackend {
 public:
  using Fn = std::function<std::string(const std::vector<Turn>&)>;
  explicit FunctionBackend(Fn fn) : fn_(std::move(fn)) {}
  std::string reply(const std::vector<Turn>& turns) override { return fn_(turns); }

 private:
  Fn fn_;
};

}  // namespace longvid
