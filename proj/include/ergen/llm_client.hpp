#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>

namespace ergen::llm {

struct ChatRequest {
  std::optional<std::string> system_text;
  std::string user_text;
  double temperature = 0.0;
  int max_output_tokens = 1024;
};

// Hex SHA-256 over a length-prefixed canonical encoding of the request.
// Independent of process, platform and map ordering.
std::string fingerprint(const ChatRequest& request);

// One network round trip. Implementations throw TimeoutError, AuthError or
// TransportError; the client decides what to retry.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string send(const ChatRequest& request) = 0;
};

struct HttpSettings {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o";
  std::string api_key_env = "OPENAI_API_KEY";
  int timeout_seconds = 120;
};

// Chat-completions wire format: POST {model, messages, temperature,
// max_tokens} with a bearer token; reads choices[0].message.content.
class HttpTransport final : public Transport {
 public:
  // Throws ConfigError when the credential variable is unset or empty.
  explicit HttpTransport(HttpSettings settings);
  std::string send(const ChatRequest& request) override;

 private:
  HttpSettings settings_;
  std::string api_key_;
  std::string origin_;
  std::string path_;
};

// Request-fingerprint to response map persisted as JSON Lines. Each line is
// {"fingerprint", "request", "response"}; the file only ever grows.
class Cassette {
 public:
  Cassette() = default;

  // Loads `path` if it exists; later appends go to the same file. Throws
  // LoadError on malformed lines or fingerprints that do not match their
  // recorded request.
  static std::shared_ptr<Cassette> open(const std::filesystem::path& path);

  std::optional<std::string> find(const std::string& fingerprint) const;

  // First write wins; returns false if the fingerprint was already present.
  bool append(const ChatRequest& request, const std::string& response);

  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::optional<std::filesystem::path> path_;
  std::map<std::string, std::string> entries_;
};

enum class Mode { Live, Record, Replay };

std::optional<Mode> parse_mode(std::string_view text);
std::string_view mode_name(Mode mode);

struct ClientOptions {
  Mode mode = Mode::Replay;
  int max_attempts = 3;
  std::chrono::milliseconds backoff{500};
  int max_in_flight = 4;
  // Minimum spacing between request starts; zero disables.
  std::chrono::milliseconds min_interval{0};
  std::function<void(std::chrono::milliseconds)> sleep;
};

struct ClientStats {
  std::size_t requests = 0;
  std::size_t network_calls = 0;
  std::size_t cassette_hits = 0;
  std::size_t prompt_chars = 0;
  std::size_t response_chars = 0;
};

class Client {
 public:
  // Live needs a transport, Replay a cassette, Record both.
  Client(ClientOptions options, std::shared_ptr<Transport> transport, std::shared_ptr<Cassette> cassette);

  // Thread-safe. Throws ReplayMiss, TimeoutError, AuthError or
  // TransportError. The returned text is never empty.
  std::string complete(const ChatRequest& request);

  ClientStats stats() const;
  Mode mode() const noexcept { return options_.mode; }

 private:
  std::string call_network(const ChatRequest& request);

  ClientOptions options_;
  std::shared_ptr<Transport> transport_;
  std::shared_ptr<Cassette> cassette_;
  std::counting_semaphore<1024> in_flight_;
  std::mutex pace_mutex_;
  std::chrono::steady_clock::time_point next_start_{};

  std::atomic<std::size_t> requests_{0};
  std::atomic<std::size_t> network_calls_{0};
  std::atomic<std::size_t> cassette_hits_{0};
  std::atomic<std::size_t> prompt_chars_{0};
  std::atomic<std::size_t> response_chars_{0};
};

}  // namespace ergen::llm
