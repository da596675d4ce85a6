#pragma once

#include <optional>
#include <string>
#include <vector>

#include "delib/prag.hpp"

namespace delib {

// Debate-level termination thresholds.
inline constexpr double kReflectionPlateauThreshold = 0.05;
inline constexpr double kNoveltyExhaustionThreshold = 0.10;

struct ReflectionReport {
  double logic = 0.5;
  double novelty = 0.5;
  double rebuttal = 0.5;
  double total = 0.5;  // 0.4*logic + 0.3*novelty + 0.3*rebuttal, recomputed
  std::vector<std::string> flaws;
  std::string discovery_need;
  std::string refined_stance;
  bool parse_failed = false;
};

// Recompute the weighted total from components; stored totals are never
// trusted from the model.
double reflection_total(double logic, double novelty, double rebuttal);

struct CriticSideScores {
  double logic = 0.0;
  double evidence = 0.0;
  double rebuttal = 0.0;
  std::string reasoning;
};

struct CriticReport {
  CriticSideScores plaintiff;
  CriticSideScores defense;
  std::vector<std::string> unresolved_premises;
  nlohmann::json recommendations;
  bool debate_resolved = false;
};

struct ExpertTestimony {
  std::string requested_by;  // plaintiff | defense
  std::string expert_type;
  std::string reasoning;
  bool granted = false;
  std::string court_ruling;
  std::string persona;  // synthesized from expert_type on grant
  std::string text;     // empty when denied
};

enum class CourtSignal { Wait, Close };

struct DebateRound {
  int index = 1;
  PragRoundStats prag_plaintiff;
  PragRoundStats prag_defense;
  std::string plaintiff_argument;
  std::string defense_argument;
  std::optional<ExpertTestimony> expert;
  ReflectionReport plaintiff_reflection;
  ReflectionReport defense_reflection;
  CriticReport critic;
  CourtSignal court_signal = CourtSignal::Wait;
};

enum class Termination {
  reflection_plateau,
  critic_resolution,
  novelty_exhaustion,
  judicial_signal,
  max_rounds,
};

std::string to_string(Termination termination);

struct DebateTranscript {
  std::string claim_id;
  std::vector<DebateRound> rounds;
  Termination termination = Termination::max_rounds;
  std::size_t final_pool_size = 0;  // admitted + disputed at close
  // Summed plaintiff+defense reflection totals per round, and the
  // convergence deltas over that series (round 1 measured from 0).
  std::vector<double> reflection_totals;
  std::vector<double> reflection_deltas;
  std::vector<std::string> warnings;
  nlohmann::json configuration;
};

struct RoleSwitchResult {
  DebateTranscript switched;
  double agent_a_consistency = 6.0;
  double agent_b_consistency = 6.0;
  double overall_consistency = 6.0;  // gamma
  std::string contradictions;
  bool parse_failed = false;
};

struct DebateSettings {
  int max_rounds = 10;
  int per_round_k = 3;
  double novelty_tau = kNoveltyTauDefault;
  int prag_iteration_cap = kPragIterationCap;
};

// Fixed-order termination check, evaluated after every completed round:
// (i) reflection plateau (two consecutive inter-round deltas below 0.05,
// so three rounds minimum), (ii) critic resolution, (iii) mean novelty of
// the last two executed P-RAG calls below 0.10, (iv) judicial Close,
// (v) round cap.
std::optional<Termination> check_termination(
    const std::vector<DebateRound>& rounds,
    const std::vector<double>& round_totals,
    const std::vector<PragRoundStats>& executed_prag, int max_rounds);

// Runs the five-step round loop over one claim. One instance per debate;
// pool mutations happen only on this sequential control path.
class DebateOrchestrator {
 public:
  DebateOrchestrator(const Claim& claim, const PremiseSet& premises,
                     const CorpusIndex& store, Embedder& embedder,
                     AgentRuntime& runtime, DebateSettings settings);

  DebateTranscript run(EvidencePool& pool);

 private:
  struct CounselState {
    RoleId role;
    std::string side;
    std::string job_title;
    std::vector<std::string> arguments;
    std::string pending_discovery_need;  // from last reflection
    std::vector<PragRoundStats> prag_history;  // executed calls only
    bool prag_stopped = false;
    PragStopReason prag_stop_reason = PragStopReason::none;
  };

  PragRoundStats discovery_step(CounselState& counsel, EvidencePool& pool,
                                int round_index);
  std::string argument_step(CounselState& counsel, const EvidencePool& pool);
  std::optional<ExpertTestimony> expert_step(const EvidencePool& pool);
  std::optional<ExpertTestimony> poll_expert_request(CounselState& counsel,
                                                     const EvidencePool& pool);
  ReflectionReport reflection_step(CounselState& counsel,
                                   const CounselState& opponent,
                                   int round_index);
  CriticReport critic_step(int round_index);
  CourtSignal completion_check();

  std::string recent_history(std::size_t n = 4) const;
  void push_history(const std::string& speaker, const std::string& text);

  const Claim* claim_;
  const PremiseSet* premises_;
  const CorpusIndex* store_;
  Embedder* embedder_;
  AgentRuntime* runtime_;
  DebateSettings settings_;

  CounselState plaintiff_;
  CounselState defense_;
  std::vector<std::string> history_;  // labeled spoken messages
  std::vector<PragRoundStats> executed_prag_;  // wall order, both counsels
  std::vector<std::string> warnings_;
};

// Restores the pre-debate pool, swaps the counsel model bindings, re-runs the
// debate under the switched round cap, then has the consistency analyzer
// score both transcripts. Analyzer parse failure yields the neutral gamma 6.0.
RoleSwitchResult run_role_switch(const Claim& claim, const PremiseSet& premises,
                                 const CorpusIndex& store, Embedder& embedder,
                                 AgentRuntime& runtime,
                                 const EvidencePool& original_pool,
                                 const DebateTranscript& primary,
                                 DebateSettings switched_settings,
                                 EvidencePool& restored_pool_out);

}  // namespace delib
