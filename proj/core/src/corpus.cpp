#include "delib/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "delib/embedder.hpp"
#include "delib/errors.hpp"
#include "json.hpp"

namespace delib {

Vec normalize(const Vec& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error("degenerate embedding: zero or non-finite norm");
  }
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / norm;
  return out;
}

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) {
    throw Error("embedding dimension mismatch: " + std::to_string(a.size()) +
                " vs " + std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double cosine_clamped(const Vec& a, const Vec& b) {
  return std::clamp(dot(a, b), -1.0, 1.0);
}

double novelty(const Vec& candidate, const std::vector<Vec>& pool) {
  if (pool.empty()) return 1.0;
  double max_cos = -1.0;
  for (const Vec& p : pool) max_cos = std::max(max_cos, cosine_clamped(candidate, p));
  return std::clamp(1.0 - max_cos, 0.0, 1.0);
}

CorpusIndex::CorpusIndex(std::size_t dimension) : dimension_(dimension) {}

namespace {

void ingest_record(CorpusRecord& rec, Embedder& embedder, std::size_t dimension,
                   const std::string& where) {
  if (rec.embedding.has_value()) {
    if (rec.embedding->size() != dimension) {
      throw Error(where + ": embedding dimension " +
                  std::to_string(rec.embedding->size()) + ", index expects " +
                  std::to_string(dimension));
    }
    rec.embedding = normalize(*rec.embedding);
  } else {
    if (embedder.dimension() != dimension) {
      throw Error(where + ": provider dimension " +
                  std::to_string(embedder.dimension()) + ", index expects " +
                  std::to_string(dimension));
    }
    std::string text = rec.title.empty() ? rec.body : rec.title + "\n" + rec.body;
    rec.embedding = embedder.embed(text);
  }
}

}  // namespace

CorpusIndex CorpusIndex::from_records(std::vector<CorpusRecord> records,
                                      Embedder& embedder,
                                      std::size_t dimension) {
  CorpusIndex index(dimension);
  index.records_.reserve(records.size());
  for (auto& rec : records) {
    if (rec.doc_id.empty()) throw Error("corpus record with empty doc_id");
    ingest_record(rec, embedder, dimension, "doc " + rec.doc_id);
    for (const auto& existing : index.records_) {
      if (existing.doc_id == rec.doc_id) {
        throw Error("duplicate doc_id in corpus: " + rec.doc_id);
      }
    }
    index.records_.push_back(std::move(rec));
  }
  return index;
}

CorpusIndex CorpusIndex::load_jsonl(const std::string& path, Embedder& embedder,
                                    std::size_t dimension) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path);

  std::vector<CorpusRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      throw Error(where + ": invalid JSON record");
    }
    for (const char* field : {"doc_id", "title", "body", "journal", "year"}) {
      if (!doc.contains(field)) {
        throw Error(where + ": missing required field '" + field + "'");
      }
    }
    CorpusRecord rec;
    rec.doc_id = doc.at("doc_id").get<std::string>();
    rec.title = doc.at("title").get<std::string>();
    rec.body = doc.at("body").get<std::string>();
    rec.journal = doc.at("journal").get<std::string>();
    rec.year = doc.at("year").get<int>();
    if (doc.contains("embedding") && !doc.at("embedding").is_null()) {
      rec.embedding = doc.at("embedding").get<Vec>();
    }
    records.push_back(std::move(rec));
  }
  return from_records(std::move(records), embedder, dimension);
}

std::vector<RetrievalHit> CorpusIndex::search(const Vec& query,
                                              std::size_t k) const {
  if (records_.empty()) throw Error("empty corpus");
  if (k == 0) throw Error("search requires k >= 1");

  std::vector<RetrievalHit> hits;
  hits.reserve(records_.size());
  for (const auto& rec : records_) {
    hits.push_back({rec.doc_id, dot(query, *rec.embedding), &rec});
  }
  std::sort(hits.begin(), hits.end(),
            [](const RetrievalHit& a, const RetrievalHit& b) {
              if (a.similarity != b.similarity) return a.similarity > b.similarity;
              return a.doc_id < b.doc_id;
            });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

const CorpusRecord* CorpusIndex::find(const std::string& doc_id) const {
  for (const auto& rec : records_) {
    if (rec.doc_id == doc_id) return &rec;
  }
  return nullptr;
}

}  // namespace delib
