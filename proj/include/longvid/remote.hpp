#pragma once

#include <chrono>
#include <string>

#include "longvid/llm_gateway.hpp"
#include "longvid/tool_protocol.hpp"

namespace longvid {

/// Splits "https://host:port/path" into scheme+host+port and path.
struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};
Endpoint split_endpoint(const std::string& url);

/// Chat-completion client: POSTs {"model", "temperature", "messages"} and
/// reads choices[0].message.content. Bearer token from `api_key`.
class RemoteChatBackend final : public ChatBackend {
 public:
  RemoteChatBackend(std::string endpoint, std::string model, double temperature,
                    std::string api_key, std::chrono::milliseconds timeout);

  /// Reads LONGVID_API_KEY (falling back to OPENAI_API_KEY) and
  /// LONGVID_LLM_ENDPOINT from the environment.
  static RemoteChatBackend from_env(const GatewayConfig& config);

  std::string reply(const std::vector<Turn>& turns) override;

 private:
  Endpoint endpoint_;
  std::string model_;
  double temperature_;
  std::string api_key_;
  std::chrono::milliseconds timeout_;
};

/// Speaks the tool wire protocol: POST <endpoint> with encode_request(cmd),
/// response body decoded with decode_response.
class RemoteToolBackend final : public ToolBackend {
 public:
  RemoteToolBackend(std::string endpoint, std::chrono::milliseconds timeout);

  ToolReturn invoke(const ToolCommand& command) override;

 private:
  Endpoint endpoint_;
  std::chrono::milliseconds timeout_;
};

}  // namespace longvid
