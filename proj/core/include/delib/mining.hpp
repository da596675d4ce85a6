#pragma once

#include <optional>
#include <string>
#include <vector>

#include "delib/runtime.hpp"
#include "delib/verdict.hpp"

namespace delib {

struct Claim {
  std::string claim_id;
  std::string text;
  std::optional<Label> gold_label;
};

struct PremiseSet {
  std::vector<std::string> premises;
  bool fallback = false;   // miner reply had no parseable premises
  bool truncated = false;  // soft cap applied
};

// Soft cap on premise fan-out; exceeding replies are truncated with a
// transcript warning.
inline constexpr std::size_t kMaxPremises = 15;

// Parses a numbered list ("N." or "N)" prefixes, markdown wrappers
// tolerated), strips numbering, drops empty lines, dedupes after whitespace
// normalization keeping first occurrence. Zero parseable premises fall back
// to the claim text itself with fallback=true.
PremiseSet parse_premises(const std::string& reply,
                          const std::string& claim_text);

// Renders the decomposition prompt, invokes the miner, parses the reply.
PremiseSet decompose(const Claim& claim, AgentRuntime& runtime);

}  // namespace delib
