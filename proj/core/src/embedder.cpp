#include "delib/embedder.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "delib/errors.hpp"

#define CPPHTTPLIB_NO_EXCEPTIONS
#include "httplib.h"
#include "json.hpp"

namespace delib {

namespace {

// FNV-1a, fixed offset/prime so vectors are stable across platforms.
std::uint64_t fnv1a(const std::string& s, std::uint64_t seed) {
  std::uint64_t h = 14695981039346656037ull ^ (seed * 0x9e3779b97f4a7c15ull);
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace

HashedNgramEmbedder::HashedNgramEmbedder(std::size_t dimension,
                                         std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension_ == 0) throw Error("embedder dimension must be positive");
}

Vec HashedNgramEmbedder::embed(const std::string& text) {
  if (text.empty()) throw Error("cannot embed empty text");
  const auto tokens = tokenize(text);
  Vec v(dimension_, 0.0);
  auto bump = [&](const std::string& gram) {
    const std::uint64_t h = fnv1a(gram, seed_);
    const std::size_t bucket = static_cast<std::size_t>(h % dimension_);
    const double sign = ((h / dimension_) & 1ull) ? 1.0 : -1.0;
    v[bucket] += sign;
  };
  for (const auto& tok : tokens) bump(tok);
  for (std::size_t i = 1; i < tokens.size(); ++i) bump(tokens[i - 1] + " " + tokens[i]);
  return normalize(v);
}

HttpEmbedder::HttpEmbedder(HttpEmbedderOptions options, std::size_t dimension)
    : options_(std::move(options)), dimension_(dimension) {}

Vec HttpEmbedder::embed(const std::string& text) {
  if (text.empty()) throw Error("cannot embed empty text");

  nlohmann::json body{{"model", options_.model_id}, {"input", text}};

  std::string scheme_host;
  std::string request_path = "/";
  const auto scheme_end = options_.url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error("embedding endpoint url must include a scheme: " + options_.url);
  }
  const auto path_start = options_.url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host = options_.url;
  } else {
    scheme_host = options_.url.substr(0, path_start);
    request_path = options_.url.substr(path_start);
  }

  httplib::Headers headers;
  if (const char* key = std::getenv(options_.api_key_env.c_str())) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(options_.retry_backoff_ms * attempt));
    }
    httplib::Client client(scheme_host);
    client.set_read_timeout(options_.timeout_seconds, 0);
    client.set_connection_timeout(options_.timeout_seconds, 0);
    auto res = client.Post(request_path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "transport failure contacting " + scheme_host;
      continue;
    }
    if (res->status >= 500) {
      last_error = "server error " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportError("embedding endpoint returned status " +
                           std::to_string(res->status));
    }
    nlohmann::json doc = nlohmann::json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("data") || doc["data"].empty() ||
        !doc["data"][0].contains("embedding")) {
      throw TransportError("embedding endpoint reply missing data[0].embedding");
    }
    Vec v = doc["data"][0]["embedding"].get<Vec>();
    if (v.size() != dimension_) {
      throw Error("embedding endpoint returned dimension " +
                  std::to_string(v.size()) + ", expected " +
                  std::to_string(dimension_));
    }
    return normalize(v);
  }
  throw TransportError("embedding request failed after " +
                       std::to_string(options_.max_retries + 1) +
                       " attempts: " + last_error);
}

}  // namespace delib
