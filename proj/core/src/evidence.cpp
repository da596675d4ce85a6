#include "delib/evidence.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "delib/errors.hpp"

namespace delib {

std::string to_string(EvidenceStatus status) {
  switch (status) {
    case EvidenceStatus::admitted: return "admitted";
    case EvidenceStatus::disputed: return "disputed";
    case EvidenceStatus::discarded: return "discarded";
  }
  return "discarded";
}

std::string to_string(EvidenceOrigin origin) {
  switch (origin) {
    case EvidenceOrigin::premise_pool: return "premise_pool";
    case EvidenceOrigin::proponent_pool: return "proponent_pool";
    case EvidenceOrigin::opponent_pool: return "opponent_pool";
    case EvidenceOrigin::prag: return "prag";
  }
  return "premise_pool";
}

AdmissibilityResult score_admissibility(double relevance, double credibility) {
  if (!(relevance >= 0.0 && relevance <= 1.0)) {
    throw Error("relevance out of [0,1]: " + std::to_string(relevance));
  }
  if (!(credibility >= 0.0 && credibility <= 1.0)) {
    throw Error("credibility out of [0,1]: " + std::to_string(credibility));
  }
  AdmissibilityResult out;
  out.weight = relevance * credibility;
  if (out.weight > 0.5) {
    out.status = EvidenceStatus::admitted;
  } else if (out.weight > 0.1) {
    out.status = EvidenceStatus::disputed;
  } else {
    out.status = EvidenceStatus::discarded;
  }
  return out;
}

bool EvidencePool::contains(const std::string& doc_id) const {
  return find(doc_id) != nullptr;
}

const EvidenceItem* EvidencePool::find(const std::string& doc_id) const {
  for (const auto& item : items_) {
    if (item.doc_id == doc_id) return &item;
  }
  return nullptr;
}

bool EvidencePool::add_or_keep_max(EvidenceItem item) {
  for (auto& existing : items_) {
    if (existing.doc_id == item.doc_id) {
      if (item.weight > existing.weight) {
        existing = std::move(item);
        sort_items();
        return true;
      }
      return false;
    }
  }
  items_.push_back(std::move(item));
  sort_items();
  return true;
}

void EvidencePool::sort_items() {
  // Admitted first by descending weight (doc_id breaks ties), then disputed,
  // then discarded, each doc_id-ordered for deterministic rendering.
  auto rank = [](EvidenceStatus s) {
    switch (s) {
      case EvidenceStatus::admitted: return 0;
      case EvidenceStatus::disputed: return 1;
      case EvidenceStatus::discarded: return 2;
    }
    return 2;
  };
  std::sort(items_.begin(), items_.end(),
            [&](const EvidenceItem& a, const EvidenceItem& b) {
              if (rank(a.status) != rank(b.status)) {
                return rank(a.status) < rank(b.status);
              }
              if (a.status == EvidenceStatus::admitted &&
                  a.weight != b.weight) {
                return a.weight > b.weight;
              }
              return a.doc_id < b.doc_id;
            });
}

std::vector<const EvidenceItem*> EvidencePool::with_status(
    EvidenceStatus status) const {
  std::vector<const EvidenceItem*> out;
  for (const auto& item : items_) {
    if (item.status == status) out.push_back(&item);
  }
  return out;
}

std::vector<const EvidenceItem*> EvidencePool::admitted() const {
  return with_status(EvidenceStatus::admitted);
}

std::vector<const EvidenceItem*> EvidencePool::disputed() const {
  return with_status(EvidenceStatus::disputed);
}

std::vector<Vec> EvidencePool::novelty_embeddings() const {
  std::vector<Vec> out;
  for (const auto& item : items_) {
    if (item.status == EvidenceStatus::admitted ||
        item.status == EvidenceStatus::disputed) {
      out.push_back(item.embedding);
    }
  }
  return out;
}

std::size_t EvidencePool::count(EvidenceStatus status) const {
  std::size_t n = 0;
  for (const auto& item : items_) {
    if (item.status == status) ++n;
  }
  return n;
}

std::string render_evidence_list(const EvidencePool& pool,
                                 bool include_disputed) {
  std::ostringstream out;
  for (const EvidenceItem* item : pool.admitted()) {
    out << "Source " << item->doc_id << " (" << item->journal << ", "
        << item->year << ", w=" << item->weight << "): " << item->text << "\n";
  }
  if (include_disputed) {
    for (const EvidenceItem* item : pool.disputed()) {
      out << "[DISPUTED] Source " << item->doc_id << " (" << item->journal
          << ", " << item->year << ", w=" << item->weight
          << "): " << item->text << "\n";
    }
  }
  std::string text = out.str();
  if (text.empty()) text = "(no admitted evidence yet)\n";
  return text;
}

namespace {

std::optional<double> find_labeled_number(const std::string& lower,
                                          const std::string& label) {
  const auto pos = lower.find(label);
  if (pos == std::string::npos) return std::nullopt;
  std::size_t i = pos + label.size();
  while (i < lower.size() &&
         !std::isdigit(static_cast<unsigned char>(lower[i])) &&
         lower[i] != '.') {
    // Stop scanning at a line break: the number must follow its label.
    if (lower[i] == '\n') return std::nullopt;
    ++i;
  }
  if (i >= lower.size()) return std::nullopt;
  std::size_t end = i;
  while (end < lower.size() &&
         (std::isdigit(static_cast<unsigned char>(lower[end])) ||
          lower[end] == '.')) {
    ++end;
  }
  try {
    return std::stod(lower.substr(i, end - i));
  } catch (...) {
    return std::nullopt;
  }
}

std::optional<double> number_field(const nlohmann::json& doc,
                                   const std::string& key) {
  if (!doc.contains(key)) return std::nullopt;
  const auto& v = doc.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return std::stod(v.get<std::string>());
    } catch (...) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::pair<double, double>> parse_arbiter_scores(
    const std::string& reply) {
  std::optional<double> r;
  std::optional<double> c;
  try {
    nlohmann::json doc = extract_json(reply);
    r = number_field(doc, "relevance");
    c = number_field(doc, "credibility");
  } catch (const MalformedReply&) {
    // fall through to labeled-number scan
  }
  if (!r || !c) {
    std::string lower;
    lower.reserve(reply.size());
    for (unsigned char ch : reply) lower.push_back(static_cast<char>(std::tolower(ch)));
    if (!r) r = find_labeled_number(lower, "relevance");
    if (!c) c = find_labeled_number(lower, "credibility");
  }
  if (!r || !c) return std::nullopt;
  if (*r < 0.0 || *r > 1.0 || *c < 0.0 || *c > 1.0) return std::nullopt;
  return std::make_pair(*r, *c);
}

namespace {

struct Candidate {
  const CorpusRecord* record;
  EvidenceOrigin origin;
};

// Duplicates across queries are kept: each occurrence is arbitrated on its
// own and the pool-level dedup keeps the higher weight.
void collect_hits(const std::vector<RetrievalHit>& hits, EvidenceOrigin origin,
                  std::vector<Candidate>& candidates) {
  for (const auto& hit : hits) candidates.push_back({hit.record, origin});
}

std::string render_candidates(const std::vector<Candidate>& candidates,
                              EvidenceOrigin origin) {
  std::ostringstream out;
  std::vector<const CorpusRecord*> listed;
  for (const auto& c : candidates) {
    if (c.origin != origin) continue;
    if (std::find(listed.begin(), listed.end(), c.record) != listed.end()) continue;
    listed.push_back(c.record);
    out << "Source " << c.record->doc_id << " (" << c.record->journal << ", "
        << c.record->year << "): " << c.record->title << "\n";
  }
  std::string text = out.str();
  if (text.empty()) text = "(empty)\n";
  return text;
}

}  // namespace

EvidencePool negotiate(const Claim& claim, const PremiseSet& premises,
                       const CorpusIndex& store, Embedder& embedder,
                       AgentRuntime& runtime, int k_init) {
  if (k_init < 1) throw Error("k_init must be >= 1");
  std::vector<Candidate> candidates;

  // Premise-grounded shared retrieval: one index query per premise.
  for (const auto& premise : premises.premises) {
    collect_hits(store.search(embedder.embed(premise), k_init),
                 EvidenceOrigin::premise_pool, candidates);
  }

  // Stance-conditioned retrieval: one supporting- and one
  // challenging-oriented query.
  std::ostringstream premise_list;
  for (std::size_t i = 0; i < premises.premises.size(); ++i) {
    premise_list << (i + 1) << ". " << premises.premises[i] << "\n";
  }
  nlohmann::json stance = runtime.invoke_user_json(
      RoleId::prag_formulator,
      runtime.prompts().render("stance_queries",
                               {{"claim_text", claim.text},
                                {"premises", premise_list.str()}}));
  const std::string supporting = stance.value("supporting_query", claim.text);
  const std::string challenging = stance.value("challenging_query", claim.text);
  collect_hits(store.search(embedder.embed(supporting), k_init),
               EvidenceOrigin::proponent_pool, candidates);
  collect_hits(store.search(embedder.embed(challenging), k_init),
               EvidenceOrigin::opponent_pool, candidates);

  // Negotiation injection: both counsels see both stance pools. Replies are
  // recorded in the agent log; they do not alter scores.
  const std::string proponent_text =
      render_candidates(candidates, EvidenceOrigin::proponent_pool);
  const std::string opponent_text =
      render_candidates(candidates, EvidenceOrigin::opponent_pool);
  runtime.invoke_user(
      RoleId::plaintiff,
      runtime.prompts().render("negotiation_disclosure",
                               {{"job_title", "Plaintiff Counsel"},
                                {"claim_text", claim.text},
                                {"own_pool", proponent_text},
                                {"opposing_pool", opponent_text}}));
  runtime.invoke_user(
      RoleId::defense,
      runtime.prompts().render("negotiation_disclosure",
                               {{"job_title", "Defense Counsel"},
                                {"claim_text", claim.text},
                                {"own_pool", opponent_text},
                                {"opposing_pool", proponent_text}}));

  // Admissibility scoring: the Court arbitrates each unique candidate.
  EvidencePool pool;
  for (const auto& candidate : candidates) {
    const CorpusRecord& rec = *candidate.record;
    BackendReply reply = runtime.invoke_user(
        RoleId::court,
        runtime.prompts().render("admissibility_scoring",
                                 {{"claim", claim.text},
                                  {"evidence_text", rec.body}}));
    EvidenceItem item;
    item.doc_id = rec.doc_id;
    item.text = rec.body;
    item.title = rec.title;
    item.journal = rec.journal;
    item.year = rec.year;
    item.embedding = *rec.embedding;
    item.origin = candidate.origin;
    if (auto scores = parse_arbiter_scores(reply.text)) {
      item.relevance = scores->first;
      item.credibility = scores->second;
      const auto scored = score_admissibility(item.relevance, item.credibility);
      item.weight = scored.weight;
      item.status = scored.status;
    } else {
      runtime.note_warning("arbiter reply unparseable for doc " + rec.doc_id +
                           "; marked disputed at (0.5, 0.5)");
      item.relevance = 0.5;
      item.credibility = 0.5;
      item.weight = 0.25;
      item.status = EvidenceStatus::disputed;
    }
    pool.add_or_keep_max(std::move(item));
  }
  return pool;
}

}  // namespace delib
