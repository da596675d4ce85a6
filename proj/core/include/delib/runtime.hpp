#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace delib {

enum class RoleId {
  miner,
  plaintiff,
  defense,
  court,
  expert,
  critic,
  consistency,
  judge1,
  judge2,
  judge3,
  prag_formulator,
};

std::string to_string(RoleId role);
std::optional<RoleId> role_from_string(std::string_view text);
std::vector<RoleId> all_roles();

struct RoleConfig {
  RoleId role_id = RoleId::miner;
  std::string model_id;
  double temperature = 0.0;
  std::string system_prompt_id;  // empty: no system turn
};

enum class Speaker { system, user, assistant };

struct ChatTurn {
  Speaker speaker = Speaker::user;
  std::string content;
};

struct BackendReply {
  std::string text;
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

// Model transport. Must be safely callable from concurrent case evaluations.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendReply invoke(const RoleConfig& role,
                              const std::vector<ChatTurn>& history) = 0;
};

// Canned replies keyed by (role_id, invocation ordinal). Fails loudly on an
// unscripted call so fixtures cannot silently drift. Token counts are a
// deterministic word count unless counting is disabled.
class ScriptedBackend final : public Backend {
 public:
  explicit ScriptedBackend(std::map<RoleId, std::vector<std::string>> scripts,
                           bool count_tokens = true);

  // {"plaintiff": ["reply 1", "reply 2"], "critic": [...], ...}
  static ScriptedBackend from_json(const nlohmann::json& role_scripts,
                                   bool count_tokens = true);

  BackendReply invoke(const RoleConfig& role,
                      const std::vector<ChatTurn>& history) override;

  std::size_t consumed(RoleId role) const;

 private:
  std::map<RoleId, std::vector<std::string>> scripts_;
  std::map<RoleId, std::size_t> cursor_;
  bool count_tokens_;
};

struct HttpBackendOptions {
  std::string url;  // chat-completion endpoint
  std::string api_key_env = "DELIB_API_KEY";
  int max_retries = 3;
  int retry_backoff_ms = 250;
  int timeout_seconds = 120;
};

// POST {model, temperature, messages:[{role, content}...]} with bearer auth
// from the configured environment variable; expects an OpenAI-style reply
// carrying choices[0].message.content and usage token counts. Timeouts and
// 5xx are retried with backoff before surfacing TransportError.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpBackendOptions options);

  BackendReply invoke(const RoleConfig& role,
                      const std::vector<ChatTurn>& history) override;

 private:
  HttpBackendOptions options_;
};

// Verbatim {name} substitution. Throws naming the placeholder when a binding
// is missing; placeholders are single identifiers, so literal JSON braces in
// template text pass through untouched.
std::string render_prompt(const std::string& template_text,
                          const std::map<std::string, std::string>& bindings);

// One UTF-8 text asset per prompt, template_id = file stem.
class PromptLibrary {
 public:
  static PromptLibrary load_dir(const std::string& dir);

  const std::string& get(const std::string& template_id) const;
  bool contains(const std::string& template_id) const;
  void set(std::string template_id, std::string text);

  std::string render(const std::string& template_id,
                     const std::map<std::string, std::string>& bindings) const;

 private:
  std::map<std::string, std::string> templates_;
};

// First balanced JSON object in the text, tolerating leading/trailing prose
// and ```json fences. Throws MalformedReply (carrying the raw text) when
// nothing parses.
nlohmann::json extract_json(const std::string& text);

// Per-case runtime: binds roles to a backend and a prompt library, keeps the
// raw agent log, token totals, and transcript warnings.
class AgentRuntime {
 public:
  struct LogEntry {
    RoleId role;
    int ordinal = 0;
    std::string prompt;  // last user turn
    std::string reply;
    long prompt_tokens = 0;
    long completion_tokens = 0;
  };

  AgentRuntime(std::map<RoleId, RoleConfig> roles, Backend& backend,
               const PromptLibrary& prompts);

  BackendReply invoke(RoleId role, const std::vector<ChatTurn>& history);

  // System turn (when the role has one) + a single user turn.
  BackendReply invoke_user(RoleId role, const std::string& user_prompt);

  // invoke_user, then extract_json; one repair re-invocation with an
  // appended JSON-only instruction before the error surfaces.
  nlohmann::json invoke_user_json(RoleId role, const std::string& user_prompt);

  const RoleConfig& role(RoleId role) const;
  // Swaps model_id and temperature between two roles; prompts stay with the
  // role so the switched debate argues the same briefs with exchanged models.
  void swap_role_models(RoleId a, RoleId b);

  const PromptLibrary& prompts() const { return *prompts_; }

  void note_warning(std::string text);
  const std::vector<std::string>& warnings() const { return warnings_; }
  void clear_warnings() { warnings_.clear(); }

  const std::vector<LogEntry>& log() const { return log_; }
  long total_prompt_tokens() const { return total_prompt_tokens_; }
  long total_completion_tokens() const { return total_completion_tokens_; }
  long total_tokens() const {
    return total_prompt_tokens_ + total_completion_tokens_;
  }

 private:
  std::map<RoleId, RoleConfig> roles_;
  Backend* backend_;
  const PromptLibrary* prompts_;
  std::map<RoleId, int> ordinals_;
  std::vector<LogEntry> log_;
  std::vector<std::string> warnings_;
  long total_prompt_tokens_ = 0;
  long total_completion_tokens_ = 0;
};

}  // namespace delib
