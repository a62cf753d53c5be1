#include "longvid/llm_gateway.hpp"

#include <cmath>
#include <random>
#include <thread>

#include "longvid/error.hpp"
#include "text_util.hpp"

namespace longvid {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

LlmGateway::LlmGateway(std::shared_ptr<ChatBackend> backend, GatewayConfig config)
    : backend_(std::move(backend)), config_(std::move(config)) {
  if (!backend_) throw Error(ErrorKind::Config, "gateway needs a backend");
  if (config_.max_retries < 0) throw Error(ErrorKind::Config, "max_retries must be >= 0");
  if (config_.timeout.count() <= 0) throw Error(ErrorKind::Config, "timeout must be positive");
  sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string LlmGateway::complete(Conversation& conv, std::string user_turn) {
  auto turns = conv.turns();
  turns.push_back({Role::User, user_turn});

  // Jitter depends only on the seed, the session and the attempt number, so
  // retry timing never leaks scheduling order into a run.
  std::seed_seq seq{static_cast<std::uint64_t>(config_.seed),
                    static_cast<std::uint64_t>(std::hash<std::string>{}(conv.session_id())),
                    static_cast<std::uint64_t>(turns.size())};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> jitter(0.5, 1.0);

  std::string cause;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    ++attempts_;
    try {
      auto reply = backend_->reply(turns);
      conv.append(Role::User, std::move(user_turn));
      conv.append(Role::Assistant, reply);
      return reply;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Transport) throw;
      cause = e.what();
    }
    if (attempt < config_.max_retries) {
      const double scale = std::ldexp(1.0, attempt) * jitter(rng);
      sleeper_(std::chrono::milliseconds(
          static_cast<long long>(static_cast<double>(config_.backoff_base.count()) * scale)));
    }
  }
  throw Error(ErrorKind::Transport,
              "LLM call failed after " + std::to_string(config_.max_retries + 1) + " attempts: " + cause);
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> ordered, std::vector<Rule> rules)
    : ordered_(std::move(ordered)), rules_(std::move(rules)) {}

std::string ScriptedBackend::reply(const std::vector<Turn>& turns) {
  std::lock_guard lock(mutex_);
  ++calls_;
  std::string_view latest;
  for (auto it = turns.rbegin(); it != turns.rend(); ++it) {
    if (it->role == Role::User) {
      latest = it->text;
      break;
    }
  }
  for (const auto& rule : rules_) {
    if (latest.find(rule.contains) != std::string_view::npos) return rule.reply;
  }
  if (next_ >= ordered_.size()) {
    throw Error(ErrorKind::ScriptExhausted,
                "scripted LLM has no reply left (call " + std::to_string(calls_) + ", " +
                    std::to_string(ordered_.size()) + " ordered replies)");
  }
  return ordered_[next_++];
}

std::size_t ScriptedBackend::remaining() const {
  std::lock_guard lock(mutex_);
  return ordered_.size() - next_;
}

std::size_t ScriptedBackend::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::shared_ptr<ScriptedBackend> parse_script(const std::string& text) {
  std::vector<std::string> ordered;
  std::vector<ScriptedBackend::Rule> rules;

  enum class Block { None, Reply, Rule } block = Block::None;
  std::string key;
  std::vector<std::string> body;
  auto flush = [&] {
    while (!body.empty() && detail::trim(body.back()).empty()) body.pop_back();
    std::string joined;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (i) joined += '\n';
      joined += body[i];
    }
    if (block == Block::Reply) ordered.push_back(std::move(joined));
    if (block == Block::Rule) rules.push_back({key, std::move(joined)});
    body.clear();
  };

  int lineno = 0;
  for (const auto& line : detail::split_lines(text)) {
    ++lineno;
    if (line.rfind("@@", 0) == 0) {
      flush();
      std::string_view header = detail::trim(std::string_view(line).substr(2));
      if (header == "reply") {
        block = Block::Reply;
      } else if (header.rfind("rule ", 0) == 0 && !detail::trim(header.substr(5)).empty()) {
        block = Block::Rule;
        key = std::string(detail::trim(header.substr(5)));
      } else {
        throw Error(ErrorKind::Schema, "script line " + std::to_string(lineno) + ": expected '@@ reply' or '@@ rule <text>'");
      }
      continue;
    }
    if (block == Block::None) {
      auto t = detail::trim(line);
      if (t.empty() || t.front() == '#') continue;
      throw Error(ErrorKind::Schema, "script line " + std::to_string(lineno) + ": text outside a block");
    }
    body.push_back(line);
  }
  flush();
  return std::make_shared<ScriptedBackend>(std::move(ordered), std::move(rules));
}

std::shared_ptr<ScriptedBackend> script_from_fixture(const std::filesystem::path& path) {
  return parse_script(detail::read_file(path));
}

}  // namespace longvid
