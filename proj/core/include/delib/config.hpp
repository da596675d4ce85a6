#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "delib/panel.hpp"
#include "delib/runtime.hpp"

namespace delib {

struct RunConfig {
  std::string corpus_path;
  std::string claims_path;
  std::string output_dir;
  std::string backend = "scripted";  // http | scripted
  std::string scripted_fixture_path;
  std::string http_url;
  std::string prompts_dir;   // empty: DELIB_PROMPTS_DIR env, then built-in
  std::string markers_path;  // concession markers, one per line
  int max_rounds = 10;
  int switched_max_rounds = 2;
  int k_init = 5;
  int per_round_k = 3;
  double novelty_tau = 0.20;
  int prag_iteration_cap = 10;
  ConfidenceWeights weights;
  std::map<RoleId, RoleConfig> roles;
  std::uint64_t seed = 0;
  int parallel_claims = 1;
  std::size_t embedding_dim = 384;
};

// Role-wise model defaults (model ids are config strings, not SDK bindings).
std::map<RoleId, RoleConfig> default_role_bindings();

// Key/value document with nested sections (JSON). Unknown keys are rejected;
// partial documents inherit the defaults above.
RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_json(const nlohmann::json& doc);

// Threshold ranges, backend choice, path presence. Throws on the first
// violation; a run aborts before any claim executes.
void validate(const RunConfig& config);

// Debate-relevant snapshot embedded in transcripts: thresholds, weights,
// bindings, seed, backend -- no filesystem paths, so output trees stay
// byte-comparable across directories.
nlohmann::json config_snapshot(const RunConfig& config);

// Resolution order: explicit config value, DELIB_PROMPTS_DIR, compiled-in
// source default.
std::string resolve_prompts_dir(const RunConfig& config);
std::string resolve_markers_path(const RunConfig& config);

std::vector<Claim> load_claims_jsonl(const std::string& path);
std::vector<std::string> load_marker_list(const std::string& path);

}  // namespace delib
