#include <httplib.h>

#include <cstdlib>

#include <nlohmann/json.hpp>

#include "ergen/error.hpp"
#include "ergen/llm_client.hpp"

namespace ergen::llm {

namespace {

// Splits "https://host[:port]/path" into origin and path.
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an absolute URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpTransport::HttpTransport(HttpSettings settings) : settings_(std::move(settings)) {
  const char* key = std::getenv(settings_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw ConfigError("credential environment variable " + settings_.api_key_env + " is not set");
  }
  api_key_ = key;
  std::tie(origin_, path_) = split_url(settings_.endpoint);
}

std::string HttpTransport::send(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  if (request.system_text) messages.push_back({{"role", "system"}, {"content", *request.system_text}});
  messages.push_back({{"role", "user"}, {"content", request.user_text}});
  const nlohmann::json body{{"model", settings_.model},
                            {"messages", messages},
                            {"temperature", request.temperature},
                            {"max_tokens", request.max_output_tokens}};

  httplib::Client client(origin_);
  client.set_connection_timeout(settings_.timeout_seconds, 0);
  client.set_read_timeout(settings_.timeout_seconds, 0);
  client.set_write_timeout(settings_.timeout_seconds, 0);
  client.set_bearer_token_auth(api_key_);

  auto res = client.Post(path_, body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace),
                         "application/json");
  if (!res) {
    const auto err = res.error();
    const std::string what = "request to " + settings_.endpoint + " failed: " + httplib::to_string(err);
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) throw TimeoutError(what);
    throw TransportError(what, err == httplib::Error::Connection || err == httplib::Error::Write);
  }
  if (res->status == 401 || res->status == 403) {
    throw AuthError("provider rejected credential (HTTP " + std::to_string(res->status) + ")");
  }
  if (res->status == 408) throw TimeoutError("provider timed out (HTTP 408)");
  if (res->status != 200) {
    const bool transient = res->status == 429 || res->status >= 500;
    throw TransportError("provider returned HTTP " + std::to_string(res->status) + ": " + res->body, transient);
  }
  try {
    const auto reply = nlohmann::json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("unexpected response body: ") + e.what(), false);
  }
}

}  // namespace ergen::llm
