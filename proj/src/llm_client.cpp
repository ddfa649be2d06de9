#include "ergen/llm_client.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "ergen/digest.hpp"
#include "ergen/error.hpp"

namespace ergen::llm {

namespace {

using nlohmann::json;

json request_json(const ChatRequest& r) {
  return json{{"system", r.system_text ? json(*r.system_text) : json(nullptr)},
              {"user", r.user_text},
              {"temperature", r.temperature},
              {"max_output_tokens", r.max_output_tokens}};
}

ChatRequest request_from_json(const json& j) {
  ChatRequest r;
  if (j.contains("system") && !j.at("system").is_null()) r.system_text = j.at("system").get<std::string>();
  r.user_text = j.at("user").get<std::string>();
  r.temperature = j.at("temperature").get<double>();
  r.max_output_tokens = j.at("max_output_tokens").get<int>();
  return r;
}

std::string dump_line(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

// Doubles per attempt; the exponent stops growing at 10.
std::chrono::milliseconds backoff_for(std::chrono::milliseconds base, int attempt) {
  return base * (1LL << std::min(attempt, 10));
}

}  // namespace

std::string fingerprint(const ChatRequest& request) {
  std::string canonical = "ergen-chat-v1\n";
  if (request.system_text) {
    canonical += fmt::format("system:{}:{}\n", request.system_text->size(), *request.system_text);
  } else {
    canonical += "system:none\n";
  }
  canonical += fmt::format("user:{}:{}\n", request.user_text.size(), request.user_text);
  canonical += fmt::format("temperature:{:.4f}\nmax_output_tokens:{}\n", request.temperature, request.max_output_tokens);
  return to_hex(sha256(canonical));
}

// ---- Cassette ---------------------------------------------------------------

std::shared_ptr<Cassette> Cassette::open(const std::filesystem::path& path) {
  auto cassette = std::make_shared<Cassette>();
  cassette->path_ = path;
  std::ifstream in(path, std::ios::binary);
  if (!in) return cassette;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      std::string fp = j.at("fingerprint").get<std::string>();
      std::string response = j.at("response").get<std::string>();
      if (response.empty()) throw LoadError("empty response");
      if (j.contains("request") && fingerprint(request_from_json(j.at("request"))) != fp) {
        throw LoadError("fingerprint does not match recorded request");
      }
      cassette->entries_.emplace(std::move(fp), std::move(response));
    } catch (const std::exception& e) {
      throw LoadError(fmt::format("{}:{}: malformed cassette entry: {}", path.string(), line_no, e.what()));
    }
  }
  return cassette;
}

std::optional<std::string> Cassette::find(const std::string& fp) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(fp);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool Cassette::append(const ChatRequest& request, const std::string& response) {
  const std::string fp = fingerprint(request);
  std::lock_guard lock(mutex_);
  if (!entries_.emplace(fp, response).second) return false;
  if (path_) {
    if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
    std::ofstream out(*path_, std::ios::binary | std::ios::app);
    if (!out) throw ClientError("cannot append to cassette " + path_->string());
    out << dump_line(json{{"fingerprint", fp}, {"request", request_json(request)}, {"response", response}}) << '\n';
  }
  return true;
}

std::size_t Cassette::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

// ---- Client -----------------------------------------------------------------

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "live") return Mode::Live;
  if (text == "record") return Mode::Record;
  if (text == "replay") return Mode::Replay;
  return std::nullopt;
}

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::Live: return "live";
    case Mode::Record: return "record";
    case Mode::Replay: return "replay";
  }
  return "replay";
}

Client::Client(ClientOptions options, std::shared_ptr<Transport> transport, std::shared_ptr<Cassette> cassette)
    : options_(std::move(options)),
      transport_(std::move(transport)),
      cassette_(std::move(cassette)),
      in_flight_(std::clamp(options_.max_in_flight, 1, 1024)) {
  if (options_.max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
  if (options_.max_in_flight < 1) throw ConfigError("max_in_flight must be at least 1");
  if (options_.mode != Mode::Replay && !transport_) throw ConfigError("live and record modes need a transport");
  if (options_.mode != Mode::Live && !cassette_) throw ConfigError("record and replay modes need a cassette");
  if (!options_.sleep) options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string Client::complete(const ChatRequest& request) {
  ++requests_;
  prompt_chars_ += request.user_text.size() + (request.system_text ? request.system_text->size() : 0);
  std::string response;
  if (options_.mode == Mode::Live) {
    response = call_network(request);
  } else {
    const std::string fp = fingerprint(request);
    if (auto hit = cassette_->find(fp)) {
      ++cassette_hits_;
      response = std::move(*hit);
    } else if (options_.mode == Mode::Replay) {
      throw ReplayMiss(fp);
    } else {
      response = call_network(request);
      cassette_->append(request, response);
    }
  }
  response_chars_ += response.size();
  return response;
}

std::string Client::call_network(const ChatRequest& request) {
  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{in_flight_};

  for (int attempt = 0;; ++attempt) {
    if (options_.min_interval.count() > 0) {
      std::chrono::steady_clock::time_point start;
      {
        std::lock_guard lock(pace_mutex_);
        start = std::max(std::chrono::steady_clock::now(), next_start_);
        next_start_ = start + options_.min_interval;
      }
      std::this_thread::sleep_until(start);
    }
    ++network_calls_;
    try {
      std::string text = transport_->send(request);
      if (text.empty()) throw TransportError("model returned an empty response", false);
      return text;
    } catch (const TimeoutError& e) {
      if (attempt + 1 >= options_.max_attempts) {
        throw TimeoutError(fmt::format("{} (gave up after {} attempts)", e.what(), attempt + 1));
      }
    } catch (const TransportError& e) {
      if (!e.transient() || attempt + 1 >= options_.max_attempts) throw;
    }
    options_.sleep(backoff_for(options_.backoff, attempt));
  }
}

ClientStats Client::stats() const {
  return {requests_.load(), network_calls_.load(), cassette_hits_.load(), prompt_chars_.load(),
          response_chars_.load()};
}

}  // namespace ergen::llm
