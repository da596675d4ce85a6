#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "delib/panel.hpp"
#include "delib/verdict.hpp"

namespace delib {

struct LabeledOutcome {
  std::string claim_id;
  Label predicted = Label::SUPPORT;
  Label gold = Label::SUPPORT;
  double confidence = 0.0;
  std::array<Verdict, 3> per_judge_verdicts = {
      Verdict::INCONCLUSIVE, Verdict::INCONCLUSIVE, Verdict::INCONCLUSIVE};
  std::vector<double> round_confidences;
  // Stored adjustment terms so confidence can be recomputed per candidate
  // consensus weight.
  double sigma = 0.0;
  double q = 0.0;
  double delta_rs = 0.0;
  double delta_ref = 0.0;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct Classification {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::map<Label, ClassMetrics> per_class;
};

// Standard definitions over {SUPPORT, REFUTE}; an empty class contributes an
// F1 of 0 to the macro mean.
Classification classification_metrics(const std::vector<LabeledOutcome>& outcomes);

// (p_o - p_e) / (1 - p_e); two equal constant raters return 1.0.
double cohen_kappa(const std::vector<std::string>& a,
                   const std::vector<std::string>& b);

// Standard Fleiss computation; one row of per-category counts per item, all
// rows summing to the same rater count.
double fleiss_kappa(const std::vector<std::vector<int>>& category_counts);

struct CalibrationBucket {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double observed_acc = 0.0;
  double mean_conf = 0.0;
};

std::vector<double> default_bin_edges(std::size_t bins = 10);

// Right-closed bins over strictly increasing edges spanning [0, 1]; the first
// bin keeps its left edge so confidence 0 is representable.
std::vector<CalibrationBucket> reliability_bins(
    const std::vector<LabeledOutcome>& outcomes,
    const std::vector<double>& bin_edges);

// Sum over bins of (|B|/N) * |acc(B) - conf(B)|; empty bins contribute 0.
double ece(const std::vector<LabeledOutcome>& outcomes,
           const std::vector<double>& bin_edges);

// Two-sample Kolmogorov-Smirnov D = sup |ECDF1 - ECDF2|.
double ks_stability(const std::vector<double>& round_series,
                    const std::vector<double>& final_series);

// Per-transcript digest consumed by the sycophancy metrics.
struct TranscriptDigest {
  std::vector<std::string> plaintiff_arguments;
  std::vector<std::string> defense_arguments;
  std::vector<double> reflection_deltas;
  std::optional<double> agent_a_consistency;
  std::optional<double> agent_b_consistency;
  std::optional<double> overall_consistency;
};

struct SycophancyReport {
  double plaintiff_concession_rate = 0.0;  // markers per 1000 words
  double defense_concession_rate = 0.0;
  double mean_reflection_delta = 0.0;
  double agent_a_consistency_mean = 0.0;
  double agent_b_consistency_mean = 0.0;
  double overall_consistency_mean = 0.0;
};

SycophancyReport sycophancy_metrics(const std::vector<TranscriptDigest>& digests,
                                    const std::vector<std::string>& markers);

struct GridSearchResult {
  double best_weight = 0.0;
  std::vector<std::pair<double, double>> ece_per_weight;  // (weight, ece)
};

// Recomputes confidence per grid value from the stored sigma/q/delta terms
// and returns the ECE-minimizing consensus weight (ties to the smaller one).
GridSearchResult calibrate_consensus_weight(
    const std::vector<LabeledOutcome>& outcomes,
    const std::vector<double>& grid, const ConfidenceWeights& base);

}  // namespace delib
