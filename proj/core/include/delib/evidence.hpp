#pragma once

#include <optional>
#include <string>
#include <vector>

#include "delib/corpus.hpp"
#include "delib/embedder.hpp"
#include "delib/mining.hpp"
#include "delib/runtime.hpp"

namespace delib {

enum class EvidenceStatus { admitted, disputed, discarded };
enum class EvidenceOrigin { premise_pool, proponent_pool, opponent_pool, prag };

std::string to_string(EvidenceStatus status);
std::string to_string(EvidenceOrigin origin);

struct EvidenceItem {
  std::string doc_id;
  std::string text;
  std::string title;
  std::string journal;
  int year = 0;
  Vec embedding;
  double relevance = 0.0;
  double credibility = 0.0;
  double weight = 0.0;  // relevance * credibility
  EvidenceStatus status = EvidenceStatus::discarded;
  EvidenceOrigin origin = EvidenceOrigin::premise_pool;
};

struct AdmissibilityResult {
  double weight = 0.0;
  EvidenceStatus status = EvidenceStatus::discarded;
};

// w = r * c; admitted if w > 0.5, disputed if 0.1 < w <= 0.5, discarded if
// w <= 0.1. Out-of-range inputs throw.
AdmissibilityResult score_admissibility(double relevance, double credibility);

// Unique-by-doc_id evidence set. Admitted items are kept non-increasing in
// weight, ties broken by doc_id.
class EvidencePool {
 public:
  bool contains(const std::string& doc_id) const;
  const EvidenceItem* find(const std::string& doc_id) const;

  // Inserts, or keeps the higher-weight version when the doc_id is already
  // present (the strongest justification for a document governs it).
  // Returns true when the pool changed.
  bool add_or_keep_max(EvidenceItem item);

  const std::vector<EvidenceItem>& items() const { return items_; }

  std::vector<const EvidenceItem*> admitted() const;
  std::vector<const EvidenceItem*> disputed() const;
  std::vector<const EvidenceItem*> with_status(EvidenceStatus status) const;

  // Embeddings seen by the novelty filter: admitted + disputed.
  std::vector<Vec> novelty_embeddings() const;

  std::size_t count(EvidenceStatus status) const;
  std::size_t size() const { return items_.size(); }

 private:
  void sort_items();
  std::vector<EvidenceItem> items_;
};

// "[id] (journal, year) w=..: text" lines, admitted first; disputed items are
// flagged [DISPUTED] when included.
std::string render_evidence_list(const EvidencePool& pool,
                                 bool include_disputed);

// Arbiter reply -> (relevance, credibility). Accepts a JSON object or
// labeled numbers in prose; out-of-range or missing values return nullopt.
std::optional<std::pair<double, double>> parse_arbiter_scores(
    const std::string& reply);

// Pre-debate pool construction: premise-grounded shared retrieval,
// stance-conditioned retrieval, counsel disclosure (recorded, no score
// effect), per-candidate arbitration, max-weight dedup.
EvidencePool negotiate(const Claim& claim, const PremiseSet& premises,
                       const CorpusIndex& store, Embedder& embedder,
                       AgentRuntime& runtime, int k_init);

}  // namespace delib
