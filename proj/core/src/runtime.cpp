#include "delib/runtime.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "delib/errors.hpp"

#define CPPHTTPLIB_NO_EXCEPTIONS
#include "httplib.h"

namespace delib {

namespace {

constexpr std::pair<RoleId, const char*> kRoleNames[] = {
    {RoleId::miner, "miner"},
    {RoleId::plaintiff, "plaintiff"},
    {RoleId::defense, "defense"},
    {RoleId::court, "court"},
    {RoleId::expert, "expert"},
    {RoleId::critic, "critic"},
    {RoleId::consistency, "consistency"},
    {RoleId::judge1, "judge1"},
    {RoleId::judge2, "judge2"},
    {RoleId::judge3, "judge3"},
    {RoleId::prag_formulator, "prag_formulator"},
};

long word_count(const std::string& text) {
  long n = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

const char* speaker_name(Speaker s) {
  switch (s) {
    case Speaker::system: return "system";
    case Speaker::user: return "user";
    case Speaker::assistant: return "assistant";
  }
  return "user";
}

}  // namespace

std::string to_string(RoleId role) {
  for (const auto& [id, name] : kRoleNames) {
    if (id == role) return name;
  }
  return "unknown";
}

std::optional<RoleId> role_from_string(std::string_view text) {
  for (const auto& [id, name] : kRoleNames) {
    if (text == name) return id;
  }
  return std::nullopt;
}

std::vector<RoleId> all_roles() {
  std::vector<RoleId> roles;
  for (const auto& [id, name] : kRoleNames) roles.push_back(id);
  return roles;
}

ScriptedBackend::ScriptedBackend(std::map<RoleId, std::vector<std::string>> scripts,
                                 bool count_tokens)
    : scripts_(std::move(scripts)), count_tokens_(count_tokens) {}

ScriptedBackend ScriptedBackend::from_json(const nlohmann::json& role_scripts,
                                           bool count_tokens) {
  if (!role_scripts.is_object()) {
    throw Error("scripted fixture must map role ids to reply arrays");
  }
  std::map<RoleId, std::vector<std::string>> scripts;
  for (const auto& [key, value] : role_scripts.items()) {
    auto role = role_from_string(key);
    if (!role) throw Error("scripted fixture names unknown role: " + key);
    if (!value.is_array()) {
      throw Error("scripted fixture for role " + key + " must be an array");
    }
    std::vector<std::string> replies;
    for (const auto& reply : value) replies.push_back(reply.get<std::string>());
    scripts[*role] = std::move(replies);
  }
  return ScriptedBackend(std::move(scripts), count_tokens);
}

BackendReply ScriptedBackend::invoke(const RoleConfig& role,
                                     const std::vector<ChatTurn>& history) {
  auto& cursor = cursor_[role.role_id];
  const auto it = scripts_.find(role.role_id);
  if (it == scripts_.end() || cursor >= it->second.size()) {
    throw ScriptExhausted("script exhausted for role " +
                          to_string(role.role_id) + " at invocation " +
                          std::to_string(cursor + 1));
  }
  BackendReply reply;
  reply.text = it->second[cursor++];
  if (count_tokens_) {
    for (const auto& turn : history) reply.prompt_tokens += word_count(turn.content);
    reply.completion_tokens = word_count(reply.text);
  }
  return reply;
}

std::size_t ScriptedBackend::consumed(RoleId role) const {
  const auto it = cursor_.find(role);
  return it == cursor_.end() ? 0 : it->second;
}

HttpBackend::HttpBackend(HttpBackendOptions options)
    : options_(std::move(options)) {}

BackendReply HttpBackend::invoke(const RoleConfig& role,
                                 const std::vector<ChatTurn>& history) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& turn : history) {
    messages.push_back({{"role", speaker_name(turn.speaker)},
                        {"content", turn.content}});
  }
  nlohmann::json body{{"model", role.model_id},
                      {"temperature", role.temperature},
                      {"messages", messages}};

  const auto scheme_end = options_.url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error("backend url must include a scheme: " + options_.url);
  }
  const auto path_start = options_.url.find('/', scheme_end + 3);
  std::string scheme_host = path_start == std::string::npos
                                ? options_.url
                                : options_.url.substr(0, path_start);
  std::string request_path =
      path_start == std::string::npos ? "/" : options_.url.substr(path_start);

  httplib::Headers headers;
  if (const char* key = std::getenv(options_.api_key_env.c_str())) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(options_.retry_backoff_ms * attempt));
    }
    httplib::Client client(scheme_host);
    client.set_read_timeout(options_.timeout_seconds, 0);
    client.set_connection_timeout(options_.timeout_seconds, 0);
    auto res = client.Post(request_path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "transport failure contacting " + scheme_host;
      continue;
    }
    if (res->status >= 500) {
      last_error = "server error " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportError("chat endpoint returned status " +
                           std::to_string(res->status) + ": " + res->body);
    }
    nlohmann::json doc = nlohmann::json::parse(res->body, nullptr, false);
    if (doc.is_discarded()) {
      throw TransportError("chat endpoint returned unparseable JSON");
    }
    BackendReply reply;
    if (doc.contains("choices") && !doc["choices"].empty() &&
        doc["choices"][0].contains("message")) {
      reply.text = doc["choices"][0]["message"].value("content", "");
    } else if (doc.contains("text")) {
      reply.text = doc.value("text", "");
    } else {
      throw TransportError("chat endpoint reply carries no assistant text");
    }
    if (doc.contains("usage")) {
      reply.prompt_tokens = doc["usage"].value("prompt_tokens", 0);
      reply.completion_tokens = doc["usage"].value("completion_tokens", 0);
    }
    return reply;
  }
  throw TransportError("chat request failed after " +
                       std::to_string(options_.max_retries + 1) +
                       " attempts: " + last_error);
}

std::string render_prompt(const std::string& template_text,
                          const std::map<std::string, std::string>& bindings) {
  std::string out;
  out.reserve(template_text.size());
  std::size_t i = 0;
  while (i < template_text.size()) {
    const char c = template_text[i];
    if (c != '{') {
      out.push_back(c);
      ++i;
      continue;
    }
    // Placeholders are single identifiers: {name}. Anything else (JSON
    // braces, schema snippets) passes through verbatim.
    std::size_t j = i + 1;
    while (j < template_text.size() &&
           (std::isalnum(static_cast<unsigned char>(template_text[j])) ||
            template_text[j] == '_')) {
      ++j;
    }
    if (j > i + 1 && j < template_text.size() && template_text[j] == '}') {
      const std::string name = template_text.substr(i + 1, j - i - 1);
      const auto it = bindings.find(name);
      if (it == bindings.end()) {
        throw Error("missing binding for placeholder {" + name + "}");
      }
      out += it->second;
      i = j + 1;
    } else {
      out.push_back(c);
      ++i;
    }
  }
  return out;
}

PromptLibrary PromptLibrary::load_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw Error("prompt directory not found: " + dir);
  }
  PromptLibrary lib;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path());
    std::ostringstream text;
    text << in.rdbuf();
    lib.templates_[entry.path().stem().string()] = text.str();
  }
  if (lib.templates_.empty()) {
    throw Error("prompt directory holds no .txt templates: " + dir);
  }
  return lib;
}

const std::string& PromptLibrary::get(const std::string& template_id) const {
  const auto it = templates_.find(template_id);
  if (it == templates_.end()) {
    throw Error("unknown prompt template: " + template_id);
  }
  return it->second;
}

bool PromptLibrary::contains(const std::string& template_id) const {
  return templates_.count(template_id) > 0;
}

void PromptLibrary::set(std::string template_id, std::string text) {
  templates_[std::move(template_id)] = std::move(text);
}

std::string PromptLibrary::render(
    const std::string& template_id,
    const std::map<std::string, std::string>& bindings) const {
  return render_prompt(get(template_id), bindings);
}

nlohmann::json extract_json(const std::string& text) {
  // Scan for '{' starts and try each balanced candidate; string literals and
  // escapes are respected so braces inside values cannot derail the scan.
  for (std::size_t start = text.find('{'); start != std::string::npos;
       start = text.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      const char c = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        --depth;
        if (depth == 0) {
          const std::string candidate = text.substr(start, i - start + 1);
          nlohmann::json doc = nlohmann::json::parse(candidate, nullptr, false);
          if (!doc.is_discarded()) return doc;
          break;  // balanced but unparseable; try the next '{'
        }
      }
    }
  }
  throw MalformedReply("malformed agent reply: no parseable JSON object", text);
}

AgentRuntime::AgentRuntime(std::map<RoleId, RoleConfig> roles, Backend& backend,
                           const PromptLibrary& prompts)
    : roles_(std::move(roles)), backend_(&backend), prompts_(&prompts) {}

const RoleConfig& AgentRuntime::role(RoleId role) const {
  const auto it = roles_.find(role);
  if (it == roles_.end()) {
    throw Error("role not bound for this run: " + to_string(role));
  }
  return it->second;
}

void AgentRuntime::swap_role_models(RoleId a, RoleId b) {
  auto ita = roles_.find(a);
  auto itb = roles_.find(b);
  if (ita == roles_.end() || itb == roles_.end()) {
    throw Error("cannot swap unbound roles");
  }
  std::swap(ita->second.model_id, itb->second.model_id);
  std::swap(ita->second.temperature, itb->second.temperature);
}

BackendReply AgentRuntime::invoke(RoleId role_id,
                                  const std::vector<ChatTurn>& history) {
  const RoleConfig& cfg = role(role_id);
  BackendReply reply = backend_->invoke(cfg, history);

  LogEntry entry;
  entry.role = role_id;
  entry.ordinal = ++ordinals_[role_id];
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    if (it->speaker == Speaker::user) {
      entry.prompt = it->content;
      break;
    }
  }
  entry.reply = reply.text;
  entry.prompt_tokens = reply.prompt_tokens;
  entry.completion_tokens = reply.completion_tokens;
  log_.push_back(std::move(entry));

  total_prompt_tokens_ += reply.prompt_tokens;
  total_completion_tokens_ += reply.completion_tokens;
  return reply;
}

BackendReply AgentRuntime::invoke_user(RoleId role_id,
                                       const std::string& user_prompt) {
  const RoleConfig& cfg = role(role_id);
  std::vector<ChatTurn> history;
  if (!cfg.system_prompt_id.empty()) {
    history.push_back({Speaker::system, prompts_->get(cfg.system_prompt_id)});
  }
  history.push_back({Speaker::user, user_prompt});
  return invoke(role_id, history);
}

nlohmann::json AgentRuntime::invoke_user_json(RoleId role_id,
                                              const std::string& user_prompt) {
  BackendReply first = invoke_user(role_id, user_prompt);
  try {
    return extract_json(first.text);
  } catch (const MalformedReply&) {
    note_warning("malformed JSON from " + to_string(role_id) +
                 "; one repair attempt issued");
  }
  const RoleConfig& cfg = role(role_id);
  std::vector<ChatTurn> history;
  if (!cfg.system_prompt_id.empty()) {
    history.push_back({Speaker::system, prompts_->get(cfg.system_prompt_id)});
  }
  history.push_back({Speaker::user, user_prompt});
  history.push_back({Speaker::assistant, first.text});
  history.push_back({Speaker::user, "Respond ONLY in valid JSON format."});
  BackendReply second = invoke(role_id, history);
  return extract_json(second.text);  // throws MalformedReply on second failure
}

void AgentRuntime::note_warning(std::string text) {
  warnings_.push_back(std::move(text));
}

}  // namespace delib
