#include "delib/mining.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace delib {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Collapses whitespace runs; dedup key only, returned premises keep their
// original spacing.
std::string whitespace_key(const std::string& s) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

// Strips "N." / "N)" numbering plus markdown list/bold wrappers. Returns
// nullopt for lines that are not numbered points.
std::optional<std::string> strip_numbering(const std::string& raw) {
  std::string line = trim(raw);
  // Leading list punctuation some models emit around the numbering.
  while (!line.empty() && (line.front() == '*' || line.front() == '-' ||
                           line.front() == '>' || line.front() == '#')) {
    line = trim(line.substr(1));
  }
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i == 0 || i >= line.size()) return std::nullopt;
  if (line[i] != '.' && line[i] != ')') return std::nullopt;
  std::string rest = trim(line.substr(i + 1));
  // **bold** wrappers around the premise text.
  while (rest.size() >= 4 && rest.substr(0, 2) == "**" &&
         rest.substr(rest.size() - 2) == "**") {
    rest = trim(rest.substr(2, rest.size() - 4));
  }
  if (rest.empty()) return std::nullopt;
  return rest;
}

}  // namespace

PremiseSet parse_premises(const std::string& reply,
                          const std::string& claim_text) {
  PremiseSet out;
  std::set<std::string> seen;
  std::istringstream lines(reply);
  std::string line;
  while (std::getline(lines, line)) {
    auto premise = strip_numbering(line);
    if (!premise) continue;
    const std::string key = whitespace_key(*premise);
    if (seen.insert(key).second) out.premises.push_back(*premise);
  }
  if (out.premises.empty()) {
    out.premises.push_back(claim_text);
    out.fallback = true;
    return out;
  }
  if (out.premises.size() > kMaxPremises) {
    out.premises.resize(kMaxPremises);
    out.truncated = true;
  }
  return out;
}

PremiseSet decompose(const Claim& claim, AgentRuntime& runtime) {
  const std::string prompt = runtime.prompts().render(
      "premise_decomposition", {{"claim_text", claim.text}});
  BackendReply reply = runtime.invoke_user(RoleId::miner, prompt);
  PremiseSet premises = parse_premises(reply.text, claim.text);
  if (premises.fallback) {
    runtime.note_warning(
        "miner reply had no parseable premises; falling back to the claim text");
  }
  if (premises.truncated) {
    runtime.note_warning("premise set truncated to " +
                         std::to_string(kMaxPremises) + " entries");
  }
  return premises;
}

}  // namespace delib
