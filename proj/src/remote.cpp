#include "longvid/remote.hpp"

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "longvid/error.hpp"

namespace longvid {
namespace {

httplib::Client make_client(const Endpoint& ep, std::chrono::milliseconds timeout) {
  httplib::Client client(ep.base);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  return client;
}

}  // namespace

Endpoint split_endpoint(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error(ErrorKind::Config, "endpoint needs a scheme: " + url);
  auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

RemoteChatBackend::RemoteChatBackend(std::string endpoint, std::string model, double temperature,
                                     std::string api_key, std::chrono::milliseconds timeout)
    : endpoint_(split_endpoint(endpoint)),
      model_(std::move(model)),
      temperature_(temperature),
      api_key_(std::move(api_key)),
      timeout_(timeout) {}

RemoteChatBackend RemoteChatBackend::from_env(const GatewayConfig& config) {
  std::string endpoint = config.endpoint;
  if (const char* e = std::getenv("LONGVID_LLM_ENDPOINT"); e && *e) endpoint = e;
  std::string key;
  if (const char* k = std::getenv("LONGVID_API_KEY"); k && *k) {
    key = k;
  } else if (const char* o = std::getenv("OPENAI_API_KEY"); o && *o) {
    key = o;
  }
  return RemoteChatBackend(endpoint, config.model, config.temperature, key, config.timeout);
}

std::string RemoteChatBackend::reply(const std::vector<Turn>& turns) {
  nlohmann::json body;
  body["model"] = model_;
  body["temperature"] = temperature_;
  auto messages = nlohmann::json::array();
  for (const auto& t : turns) messages.push_back({{"role", to_string(t.role)}, {"content", t.text}});
  body["messages"] = std::move(messages);

  auto client = make_client(endpoint_, timeout_);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = client.Post(endpoint_.path, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorKind::Transport, "chat request failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw Error(ErrorKind::Transport, "chat endpoint returned HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::Config, "chat endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  try {
    auto j = nlohmann::json::parse(res->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Transport, std::string("unreadable chat response: ") + e.what());
  }
}

RemoteToolBackend::RemoteToolBackend(std::string endpoint, std::chrono::milliseconds timeout)
    : endpoint_(split_endpoint(endpoint)), timeout_(timeout) {}

ToolReturn RemoteToolBackend::invoke(const ToolCommand& command) {
  auto client = make_client(endpoint_, timeout_);
  auto res = client.Post(endpoint_.path, encode_request(command), "application/json");
  if (!res) throw Error(ErrorKind::Transport, "tool request failed: " + httplib::to_string(res.error()));
  if (res->status != 200 && res->status != 400 && res->status != 422) {
    throw Error(ErrorKind::Transport, "tool service returned HTTP " + std::to_string(res->status));
  }
  return decode_response(res->body, command);
}

}  // namespace longvid
