#pragma once

#include <cstdint>
#include <string>

#include "delib/corpus.hpp"

namespace delib {

// Text-to-unit-vector provider. Implementations must return normalized
// vectors of a fixed dimension and be safe for concurrent calls.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dimension() const = 0;
  virtual Vec embed(const std::string& text) = 0;
};

// Deterministic test provider: seeded stable hash of token unigrams and
// bigrams into D signed buckets, then L2-normalize. Byte-identical output for
// identical (text, seed, dimension); no network dependency.
class HashedNgramEmbedder final : public Embedder {
 public:
  explicit HashedNgramEmbedder(std::size_t dimension = 384,
                               std::uint64_t seed = 0);

  std::size_t dimension() const override { return dimension_; }
  Vec embed(const std::string& text) override;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

struct HttpEmbedderOptions {
  std::string url;  // embedding endpoint, e.g. https://host/v1/embeddings
  std::string model_id;
  std::string api_key_env = "DELIB_API_KEY";
  int max_retries = 3;
  int retry_backoff_ms = 250;
  int timeout_seconds = 60;
};

// Remote embedding endpoint: POST {model, input}, expects
// {data:[{embedding:[...]}]}. Retries transport failures with backoff, then
// throws TransportError. Output is re-normalized on arrival.
class HttpEmbedder final : public Embedder {
 public:
  HttpEmbedder(HttpEmbedderOptions options, std::size_t dimension = 384);

  std::size_t dimension() const override { return dimension_; }
  Vec embed(const std::string& text) override;

 private:
  HttpEmbedderOptions options_;
  std::size_t dimension_;
};

}  // namespace delib
