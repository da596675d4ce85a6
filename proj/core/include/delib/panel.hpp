#pragma once

#include <array>
#include <string>
#include <vector>

#include "delib/debate.hpp"
#include "delib/verdict.hpp"

namespace delib {

struct JudgeOpinion {
  RoleId judge_id = RoleId::judge1;
  int evidence_strength = 5;
  int argument_validity = 5;
  int scientific_reliability = 5;
  Verdict verdict = Verdict::INCONCLUSIVE;
  std::string claim_summary;
  std::string reasoning;
  bool invalid = false;  // double parse failure; still counts as a vote
};

struct ConfidenceWeights {
  double w_consensus = 0.8;
  double w_quality = 0.3;
  double quality_divisor = 30.0;
  double ref_floor = -0.15;
  double min_conf_majority = 0.10;
};

// The seven blocks of the six-stage judicial prompt.
struct CaseRecordBlocks {
  std::string claim;
  std::string proponent_args;
  std::string opponent_args;
  std::string evidence_summary;
  std::string role_switch_summary;
  std::string prag_metrics;
  std::string critic_evaluations;
  std::string reflection_history;
};

JudgeOpinion judge_evaluate(const CaseRecordBlocks& record, RoleId judge,
                            AgentRuntime& runtime);

struct VoteResult {
  Verdict verdict = Verdict::INCONCLUSIVE;
  double sigma = 0.0;  // winning_votes / 3
  bool tie_broken = false;
};

// Majority wins; a 1-1-1 split defers to the chief justice in the first slot.
VoteResult majority_vote(const std::array<JudgeOpinion, 3>& opinions);

struct BaseConfidence {
  double c_base = 0.0;
  double q = 0.0;
};

// q = (mean ev + mean val + mean rel) / divisor; c_base = w_c*sigma + w_q*q.
// May exceed 1.0 before the final clamp (certainty buffer).
BaseConfidence base_confidence(double sigma,
                               const std::array<JudgeOpinion, 3>& opinions,
                               const ConfidenceWeights& weights);

// (s_ref - 0.5) * 0.6, floored at -0.15: range [-0.15, +0.30].
double reflection_adjustment(double s_ref, double floor = -0.15);

// +0.10 if gamma >= 7; 0.0 if 5 <= gamma < 7; -0.05 if gamma < 5.
double roleswitch_adjustment(double gamma);

// clamp(c_base + d_rs + d_ref, 0, 1); with >= 2/3 agreement the result is
// lower-bounded at 0.10.
double final_confidence(double c_base, double delta_rs, double delta_ref,
                        double sigma, const ConfidenceWeights& weights);

struct CaseResult {
  std::string claim_id;
  Verdict verdict = Verdict::INCONCLUSIVE;
  Label mapped_label = Label::SUPPORT;
  double sigma = 0.0;
  double q = 0.0;
  double c_base = 0.0;
  double delta_rs = 0.0;
  double delta_ref = 0.0;
  double c_final = 0.0;
  std::array<JudgeOpinion, 3> opinions;
  bool tie_broken = false;
  long tokens_total = 0;
  std::optional<Label> gold_label;
  // Per-round confidence proxy series (reflection totals through the Eq.-3
  // style centering); analysis-only.
  std::vector<double> round_confidences;
};

}  // namespace delib
