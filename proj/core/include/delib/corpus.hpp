#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace delib {

using Vec = std::vector<double>;

class Embedder;

// v / ||v||_2. Throws Error("degenerate embedding") on the zero vector.
Vec normalize(const Vec& v);

// Inner product; throws on dimension mismatch.
double dot(const Vec& a, const Vec& b);

// Inner product clamped into [-1, 1] to absorb floating-point drift.
double cosine_clamped(const Vec& a, const Vec& b);

// 1 - max cosine against the pool, clamped into [0, 1].
// Empty pool returns 1.0: a fresh pool admits everything.
double novelty(const Vec& candidate, const std::vector<Vec>& pool);

struct CorpusRecord {
  std::string doc_id;
  std::string title;
  std::string body;
  std::string journal;
  int year = 0;
  std::optional<Vec> embedding;  // unit-norm once ingested
};

struct RetrievalHit {
  std::string doc_id;
  double similarity = 0.0;
  const CorpusRecord* record = nullptr;
};

// Flat exhaustive inner-product index. Immutable after ingestion; safe for
// concurrent readers.
class CorpusIndex {
 public:
  explicit CorpusIndex(std::size_t dimension = 384);

  // JSON-lines, one record per line with fields doc_id, title, body, journal,
  // year and an optional precomputed embedding. Lines with missing required
  // fields are rejected with the 1-based line number. Records without an
  // embedding are embedded from "title\nbody" via the provider.
  static CorpusIndex load_jsonl(const std::string& path, Embedder& embedder,
                                std::size_t dimension = 384);

  static CorpusIndex from_records(std::vector<CorpusRecord> records,
                                  Embedder& embedder, std::size_t dimension);

  // Top-min(k, size) hits by inner product, ties broken by lexicographically
  // smaller doc_id. Exhaustive scan; must match a brute-force oracle exactly.
  std::vector<RetrievalHit> search(const Vec& query, std::size_t k) const;

  const CorpusRecord* find(const std::string& doc_id) const;

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::size_t dimension() const { return dimension_; }
  const std::vector<CorpusRecord>& records() const { return records_; }

 private:
  std::size_t dimension_;
  std::vector<CorpusRecord> records_;
};

}  // namespace delib
