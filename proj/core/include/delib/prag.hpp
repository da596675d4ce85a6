#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "delib/evidence.hpp"

namespace delib {

// Retrieval-loop thresholds.
inline constexpr double kNoveltyTauDefault = 0.20;
inline constexpr double kRedundancySimilarityThreshold = 0.85;
inline constexpr double kRedundancyRatioThreshold = 0.70;
inline constexpr double kRelevanceGainThreshold = 0.05;
inline constexpr int kPragIterationCap = 10;

struct PragQuery {
  std::string debate_context;   // last 4 messages
  std::string agent_gap;        // counsel's one-sentence evidence need
  std::string reflection_need;  // may be empty in round 1
  std::string agent_request;    // gap [+ ". Focus also on: " + need]
  std::string formulated;
  std::string refined;
};

enum class PragStopReason {
  novelty_filter,
  redundancy,
  diminishing_returns,
  iteration_cap,
  none,
};

std::string to_string(PragStopReason reason);

struct PragRoundStats {
  int round_index = 0;
  std::string side;      // plaintiff | defense
  bool executed = true;  // false: retrieval already stopped, stub record
  int candidates = 0;
  int admitted = 0;
  double mean_novelty = 0.0;
  double mean_similarity = 0.0;
  double redundancy_ratio = 0.0;
  // First executed call per counsel has no predecessor: +infinity, so the
  // diminishing-returns criterion can never fire on it.
  double relevance_gain = std::numeric_limits<double>::infinity();
  PragStopReason stop_reason = PragStopReason::none;
};

// Three-source query construction: the counsel gap and reflection need are
// concatenated into agent_request, the formulator turns that plus the debate
// context into a query, and the Court refines it. A blank refinement falls
// back to the formulated query with a warning.
PragQuery build_query(const std::string& context, const std::string& gap,
                      const std::string& need, AgentRuntime& runtime);

struct PragOutcome {
  PragRoundStats stats;
  std::vector<std::string> added_doc_ids;
};

// Embeds the refined query, retrieves top per_round_k, scores each candidate
// for novelty against admitted+disputed pool embeddings; candidates at or
// above tau are arbiter-scored and entered (admitted when w > 0.5, disputed
// otherwise -- never silently dropped).
PragOutcome retrieve_progressive(const PragQuery& query, EvidencePool& pool,
                                 const CorpusIndex& store, Embedder& embedder,
                                 AgentRuntime& runtime,
                                 const std::string& claim_text,
                                 int per_round_k, double tau, int round_index,
                                 const std::string& side,
                                 std::optional<double> previous_mean_similarity);

// Pure stopping rule over one counsel's executed-call history, evaluated in
// fixed order: redundancy ratio > 0.70, relevance gain < 0.05, call count at
// the iteration cap.
std::pair<bool, PragStopReason> should_stop(
    const std::vector<PragRoundStats>& history, int max_iters);

}  // namespace delib
