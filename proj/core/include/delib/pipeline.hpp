#pragma once

#include <optional>
#include <string>
#include <vector>

#include "delib/config.hpp"
#include "delib/metrics.hpp"

namespace delib {

struct ClaimStatus {
  std::string claim_id;
  std::string status;  // ok | failed
  bool skipped = false;  // ok result already persisted from an earlier run
  std::string error;
  long tokens = 0;
};

struct RunManifest {
  nlohmann::json config;
  std::vector<ClaimStatus> claims;
  long tokens_total = 0;
  double wall_seconds = 0.0;
  bool deterministic_backend = true;
};

// One full evaluation cycle per claim: decompose, negotiate, primary debate,
// role switch, panel, persisted CaseResult. A failing claim is recorded and
// does not abort the run; claims with persisted ok results are skipped.
RunManifest run_pipeline(const RunConfig& config);

// Serialization used by the pipeline and the report/eval paths.
nlohmann::json transcript_to_json(const DebateTranscript& transcript);
nlohmann::json case_result_to_json(const CaseResult& result);
CaseResult case_result_from_json(const nlohmann::json& doc);
nlohmann::json manifest_to_json(const RunManifest& manifest);

std::vector<LabeledOutcome> load_outcomes(const std::string& results_path);

struct EvalReport {
  nlohmann::json json;
  std::string text;
};

// Scores persisted results against gold labels from the claims file; errors
// with "nothing to score" when no labeled overlap exists.
EvalReport evaluate_results(const std::string& results_path,
                            const std::string& claims_path);

// Metrics report over one results file, or a majority-vote merge over
// several; includes sycophancy metrics when transcript trees are present
// next to the results.
EvalReport report_results(const std::vector<std::string>& results_paths,
                          const std::string& markers_path);

}  // namespace delib
