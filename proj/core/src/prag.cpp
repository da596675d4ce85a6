#include "delib/prag.hpp"

#include <cctype>

#include "delib/errors.hpp"

namespace delib {

namespace {

bool is_blank(const std::string& s) {
  for (unsigned char c : s) {
    if (!std::isspace(c)) return false;
  }
  return true;
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::string to_string(PragStopReason reason) {
  switch (reason) {
    case PragStopReason::novelty_filter: return "novelty_filter";
    case PragStopReason::redundancy: return "redundancy";
    case PragStopReason::diminishing_returns: return "diminishing_returns";
    case PragStopReason::iteration_cap: return "iteration_cap";
    case PragStopReason::none: return "none";
  }
  return "none";
}

PragQuery build_query(const std::string& context, const std::string& gap,
                      const std::string& need, AgentRuntime& runtime) {
  if (is_blank(gap)) throw Error("P-RAG gap proposal must be non-empty");

  PragQuery query;
  query.debate_context = context;
  query.agent_gap = gap;
  query.reflection_need = need;
  query.agent_request =
      need.empty() ? gap : gap + ". Focus also on: " + need;

  BackendReply formulated = runtime.invoke_user(
      RoleId::prag_formulator,
      runtime.prompts().render("prag_formulation",
                               {{"debate_context", context},
                                {"agent_request", query.agent_request}}));
  query.formulated = trim(formulated.text);

  BackendReply refined = runtime.invoke_user(
      RoleId::court,
      runtime.prompts().render("court_query_refinement",
                               {{"original_query", query.formulated},
                                {"debate_context", context}}));
  query.refined = trim(refined.text);
  if (query.refined.empty()) {
    runtime.note_warning(
        "court refinement came back empty; using the formulated query");
    query.refined = query.formulated;
  }
  return query;
}

PragOutcome retrieve_progressive(const PragQuery& query, EvidencePool& pool,
                                 const CorpusIndex& store, Embedder& embedder,
                                 AgentRuntime& runtime,
                                 const std::string& claim_text,
                                 int per_round_k, double tau, int round_index,
                                 const std::string& side,
                                 std::optional<double> previous_mean_similarity) {
  if (query.refined.empty()) throw Error("P-RAG refined query is empty");
  if (per_round_k < 1) throw Error("per_round_k must be >= 1");

  PragOutcome outcome;
  PragRoundStats& stats = outcome.stats;
  stats.round_index = round_index;
  stats.side = side;
  stats.executed = true;

  const Vec query_embedding = embedder.embed(query.refined);
  const auto hits = store.search(query_embedding, static_cast<std::size_t>(per_round_k));
  const auto pool_embeddings = pool.novelty_embeddings();

  double novelty_sum = 0.0;
  double similarity_sum = 0.0;
  int redundant = 0;
  int novelty_rejected = 0;

  for (const auto& hit : hits) {
    ++stats.candidates;
    similarity_sum += hit.similarity;

    const Vec& candidate = *hit.record->embedding;
    double max_cos = -1.0;
    for (const Vec& p : pool_embeddings) {
      max_cos = std::max(max_cos, cosine_clamped(candidate, p));
    }
    const double nov = pool_embeddings.empty()
                           ? 1.0
                           : std::clamp(1.0 - max_cos, 0.0, 1.0);
    novelty_sum += nov;
    if (!pool_embeddings.empty() && max_cos > kRedundancySimilarityThreshold) {
      ++redundant;
    }

    if (nov < tau) {
      ++novelty_rejected;
      continue;
    }

    // New material still passes arbitration so the weight invariant holds;
    // items failing the admissibility bar stay disputed rather than vanish.
    BackendReply reply = runtime.invoke_user(
        RoleId::court,
        runtime.prompts().render("admissibility_scoring",
                                 {{"claim", claim_text},
                                  {"evidence_text", hit.record->body}}));
    EvidenceItem item;
    item.doc_id = hit.record->doc_id;
    item.text = hit.record->body;
    item.title = hit.record->title;
    item.journal = hit.record->journal;
    item.year = hit.record->year;
    item.embedding = candidate;
    item.origin = EvidenceOrigin::prag;
    if (auto scores = parse_arbiter_scores(reply.text)) {
      item.relevance = scores->first;
      item.credibility = scores->second;
      item.weight = item.relevance * item.credibility;
    } else {
      runtime.note_warning("arbiter reply unparseable for doc " +
                           item.doc_id + "; marked disputed at (0.5, 0.5)");
      item.relevance = 0.5;
      item.credibility = 0.5;
      item.weight = 0.25;
    }
    item.status = item.weight > 0.5 ? EvidenceStatus::admitted
                                    : EvidenceStatus::disputed;
    if (item.status == EvidenceStatus::admitted) ++stats.admitted;
    if (pool.add_or_keep_max(item)) {
      outcome.added_doc_ids.push_back(item.doc_id);
    }
  }

  if (stats.candidates > 0) {
    stats.mean_novelty = novelty_sum / stats.candidates;
    stats.mean_similarity = similarity_sum / stats.candidates;
    stats.redundancy_ratio = static_cast<double>(redundant) / stats.candidates;
  }
  stats.relevance_gain = previous_mean_similarity
                             ? stats.mean_similarity - *previous_mean_similarity
                             : std::numeric_limits<double>::infinity();
  if (stats.candidates > 0 && novelty_rejected == stats.candidates) {
    stats.stop_reason = PragStopReason::novelty_filter;
  }
  return outcome;
}

std::pair<bool, PragStopReason> should_stop(
    const std::vector<PragRoundStats>& history, int max_iters) {
  if (history.empty()) return {false, PragStopReason::none};
  const PragRoundStats& latest = history.back();
  if (latest.redundancy_ratio > kRedundancyRatioThreshold) {
    return {true, PragStopReason::redundancy};
  }
  if (latest.relevance_gain < kRelevanceGainThreshold) {
    return {true, PragStopReason::diminishing_returns};
  }
  if (static_cast<int>(history.size()) >= max_iters) {
    return {true, PragStopReason::iteration_cap};
  }
  return {false, PragStopReason::none};
}

}  // namespace delib
