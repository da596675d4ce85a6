#include "delib/debate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "delib/errors.hpp"

namespace delib {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) out.push_back(static_cast<char>(std::tolower(c)));
  return out;
}

bool contains_word(const std::string& haystack_lower, const std::string& word) {
  std::size_t pos = 0;
  while ((pos = haystack_lower.find(word, pos)) != std::string::npos) {
    const bool left_ok =
        pos == 0 || !std::isalnum(static_cast<unsigned char>(haystack_lower[pos - 1]));
    const std::size_t end = pos + word.size();
    const bool right_ok =
        end >= haystack_lower.size() ||
        !std::isalnum(static_cast<unsigned char>(haystack_lower[end]));
    if (left_ok && right_ok) return true;
    pos = end;
  }
  return false;
}

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

std::string join_tail(const std::vector<std::string>& items, std::size_t n,
                      const std::string& sep, const std::string& if_empty) {
  if (items.empty()) return if_empty;
  const std::size_t start = items.size() > n ? items.size() - n : 0;
  std::string out;
  for (std::size_t i = start; i < items.size(); ++i) {
    if (!out.empty()) out += sep;
    out += items[i];
  }
  return out;
}

std::optional<double> number_field(const nlohmann::json& doc,
                                   const char* key) {
  if (!doc.contains(key)) return std::nullopt;
  const auto& v = doc.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return std::stod(v.get<std::string>());
    } catch (...) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace

double reflection_total(double logic, double novelty, double rebuttal) {
  return 0.4 * logic + 0.3 * novelty + 0.3 * rebuttal;
}

std::string to_string(Termination termination) {
  switch (termination) {
    case Termination::reflection_plateau: return "reflection_plateau";
    case Termination::critic_resolution: return "critic_resolution";
    case Termination::novelty_exhaustion: return "novelty_exhaustion";
    case Termination::judicial_signal: return "judicial_signal";
    case Termination::max_rounds: return "max_rounds";
  }
  return "max_rounds";
}

std::optional<Termination> check_termination(
    const std::vector<DebateRound>& rounds,
    const std::vector<double>& round_totals,
    const std::vector<PragRoundStats>& executed_prag, int max_rounds) {
  if (rounds.empty()) return std::nullopt;
  const std::size_t n = rounds.size();

  // (i) Reflection plateau: two consecutive inter-round deltas under the
  // threshold; needs three completed rounds.
  if (n >= 3 && round_totals.size() >= 3) {
    const double d_last = std::fabs(round_totals[n - 1] - round_totals[n - 2]);
    const double d_prev = std::fabs(round_totals[n - 2] - round_totals[n - 3]);
    if (d_last < kReflectionPlateauThreshold &&
        d_prev < kReflectionPlateauThreshold) {
      return Termination::reflection_plateau;
    }
  }

  // (ii) Critic resolution.
  if (rounds.back().critic.debate_resolved) {
    return Termination::critic_resolution;
  }

  // (iii) Novelty exhaustion over the last two executed P-RAG calls.
  if (executed_prag.size() >= 2) {
    const double mean = (executed_prag[executed_prag.size() - 1].mean_novelty +
                         executed_prag[executed_prag.size() - 2].mean_novelty) /
                        2.0;
    if (mean < kNoveltyExhaustionThreshold) {
      return Termination::novelty_exhaustion;
    }
  }

  // (iv) Judicial signal.
  if (rounds.back().court_signal == CourtSignal::Close) {
    return Termination::judicial_signal;
  }

  // (v) Round cap.
  if (static_cast<int>(n) >= max_rounds) {
    return Termination::max_rounds;
  }
  return std::nullopt;
}

DebateOrchestrator::DebateOrchestrator(const Claim& claim,
                                       const PremiseSet& premises,
                                       const CorpusIndex& store,
                                       Embedder& embedder,
                                       AgentRuntime& runtime,
                                       DebateSettings settings)
    : claim_(&claim),
      premises_(&premises),
      store_(&store),
      embedder_(&embedder),
      runtime_(&runtime),
      settings_(settings) {
  plaintiff_.role = RoleId::plaintiff;
  plaintiff_.side = "plaintiff";
  plaintiff_.job_title = "Plaintiff Counsel";
  defense_.role = RoleId::defense;
  defense_.side = "defense";
  defense_.job_title = "Defense Counsel";
}

std::string DebateOrchestrator::recent_history(std::size_t n) const {
  return join_tail(history_, n, "\n\n", "(no prior proceedings)");
}

void DebateOrchestrator::push_history(const std::string& speaker,
                                      const std::string& text) {
  history_.push_back(speaker + ": " + text);
}

PragRoundStats DebateOrchestrator::discovery_step(CounselState& counsel,
                                                  EvidencePool& pool,
                                                  int round_index) {
  if (!counsel.prag_stopped) {
    const auto [stop, reason] =
        should_stop(counsel.prag_history, settings_.prag_iteration_cap);
    if (stop) {
      counsel.prag_stopped = true;
      counsel.prag_stop_reason = reason;
      warnings_.push_back(counsel.side + " retrieval stopped: " +
                          to_string(reason));
    }
  }
  if (counsel.prag_stopped) {
    PragRoundStats stub;
    stub.round_index = round_index;
    stub.side = counsel.side;
    stub.executed = false;
    stub.relevance_gain = 0.0;
    stub.stop_reason = counsel.prag_stop_reason;
    return stub;
  }

  const std::string context = recent_history();
  BackendReply gap = runtime_->invoke_user(
      counsel.role,
      runtime_->prompts().render("prag_gap_proposal",
                                 {{"job_title", counsel.job_title},
                                  {"debate_context", context}}));
  std::string gap_text = trim(gap.text);
  if (gap_text.empty()) {
    warnings_.push_back(counsel.side +
                        " proposed an empty evidence gap; using the claim");
    gap_text = "Evidence directly addressing the claim: " + claim_->text;
  }

  PragQuery query = build_query(context, gap_text,
                                counsel.pending_discovery_need, *runtime_);
  std::optional<double> previous;
  if (!counsel.prag_history.empty()) {
    previous = counsel.prag_history.back().mean_similarity;
  }
  PragOutcome outcome = retrieve_progressive(
      query, pool, *store_, *embedder_, *runtime_, claim_->text,
      settings_.per_round_k, settings_.novelty_tau, round_index, counsel.side,
      previous);
  counsel.prag_history.push_back(outcome.stats);
  executed_prag_.push_back(outcome.stats);
  return outcome.stats;
}

std::string DebateOrchestrator::argument_step(CounselState& counsel,
                                              const EvidencePool& pool) {
  const std::string template_id = counsel.role == RoleId::plaintiff
                                      ? "plaintiff_argument"
                                      : "defense_argument";
  BackendReply reply = runtime_->invoke_user(
      counsel.role,
      runtime_->prompts().render(
          template_id, {{"claim_text", claim_->text},
                        {"evidence_text", render_evidence_list(pool, true)},
                        {"history_text", recent_history()}}));
  std::string argument = trim(reply.text);
  if (argument.empty()) {
    warnings_.push_back(counsel.side + " produced an empty argument");
    argument = "(no argument presented)";
  }
  return argument;
}

std::optional<ExpertTestimony> DebateOrchestrator::poll_expert_request(
    CounselState& counsel, const EvidencePool& pool) {
  BackendReply reply = runtime_->invoke_user(
      counsel.role,
      runtime_->prompts().render("expert_request",
                                 {{"history_summary", recent_history()}}));
  nlohmann::json doc;
  try {
    doc = extract_json(reply.text);
  } catch (const MalformedReply&) {
    if (!contains_word(lower(reply.text), "none")) {
      warnings_.push_back(counsel.side +
                          " expert request unparseable; treated as None");
    }
    return std::nullopt;
  }
  const std::string expert_type = trim(doc.value("expert_type", ""));
  if (expert_type.empty()) return std::nullopt;

  ExpertTestimony testimony;
  testimony.requested_by = counsel.side;
  testimony.expert_type = expert_type;
  testimony.reasoning = doc.value("reasoning", "");

  BackendReply ruling = runtime_->invoke_user(
      RoleId::court,
      runtime_->prompts().render("court_expert_admissibility",
                                 {{"requester", counsel.job_title},
                                  {"expert_type", testimony.expert_type},
                                  {"reasoning", testimony.reasoning}}));
  testimony.court_ruling = trim(ruling.text);
  const std::string ruling_lower = lower(testimony.court_ruling);
  testimony.granted = ruling_lower.rfind("granted", 0) == 0 ||
                      contains_word(ruling_lower, "granted");
  if (!testimony.granted) return testimony;

  // Dynamically generated persona: the base expert system prompt extended
  // with the requested expertise.
  testimony.persona = testimony.expert_type;
  std::vector<ChatTurn> turns;
  turns.push_back({Speaker::system,
                   runtime_->prompts().get("expert_system") +
                       "\nYou are testifying as: " + testimony.persona + "."});
  turns.push_back(
      {Speaker::user,
       runtime_->prompts().render(
           "expert_testimony",
           {{"claim_text", claim_->text},
            {"job_title", testimony.persona},
            {"expertise_list", testimony.reasoning.empty()
                                   ? testimony.expert_type
                                   : testimony.reasoning},
            {"evidence_text", render_evidence_list(pool, true)},
            {"history_text", recent_history()}})});
  BackendReply expert_reply = runtime_->invoke(RoleId::expert, turns);
  testimony.text = trim(expert_reply.text);
  return testimony;
}

std::optional<ExpertTestimony> DebateOrchestrator::expert_step(
    const EvidencePool& pool) {
  // One testimony slot per round; the first requesting side claims it,
  // whatever the Court then rules.
  if (auto testimony = poll_expert_request(plaintiff_, pool)) return testimony;
  if (auto testimony = poll_expert_request(defense_, pool)) return testimony;
  return std::nullopt;
}

ReflectionReport DebateOrchestrator::reflection_step(
    CounselState& counsel, const CounselState& opponent, int round_index) {
  const bool is_plaintiff = counsel.role == RoleId::plaintiff;
  const std::string side = is_plaintiff ? "Plaintiff" : "Defense";
  const std::string opp_side = is_plaintiff ? "Defense" : "Plaintiff";
  const std::string prompt = runtime_->prompts().render(
      "self_reflection",
      {{"job_title", counsel.job_title},
       {"side", side},
       {"round_num", std::to_string(round_index)},
       {"claim", claim_->text},
       {"my_recent_arguments",
        join_tail(counsel.arguments, 2, "\n---\n", "(none yet)")},
       {"opp_side_upper", is_plaintiff ? "DEFENSE" : "PLAINTIFF"},
       {"opponent_recent_arguments",
        join_tail(opponent.arguments, 2, "\n---\n", "(none yet)")},
       {"opp_side", opp_side}});

  ReflectionReport report;
  try {
    nlohmann::json doc = runtime_->invoke_user_json(counsel.role, prompt);
    const nlohmann::json scores =
        doc.contains("scores") && doc["scores"].is_object() ? doc["scores"]
                                                            : doc;
    report.logic = clamp_unit(number_field(scores, "logic").value_or(0.5));
    report.novelty = clamp_unit(number_field(scores, "novelty").value_or(0.5));
    report.rebuttal =
        clamp_unit(number_field(scores, "rebuttal").value_or(0.5));
    if (doc.contains("flaws_identified") && doc["flaws_identified"].is_array()) {
      for (const auto& flaw : doc["flaws_identified"]) {
        if (flaw.is_string()) report.flaws.push_back(flaw.get<std::string>());
      }
    }
    report.discovery_need = trim(doc.value("discovery_need", ""));
    report.refined_stance = doc.value("refined_stance", "");
  } catch (const MalformedReply&) {
    report.parse_failed = true;
    report.logic = report.novelty = report.rebuttal = 0.5;
    warnings_.push_back(counsel.side +
                        " reflection unparseable; defaulted to (0.5, 0.5, 0.5)");
  }
  report.total = reflection_total(report.logic, report.novelty, report.rebuttal);
  counsel.pending_discovery_need = report.discovery_need;
  return report;
}

CriticReport DebateOrchestrator::critic_step(int round_index) {
  nlohmann::json doc = runtime_->invoke_user_json(
      RoleId::critic,
      runtime_->prompts().render("critic_round_evaluation",
                                 {{"claim", claim_->text},
                                  {"round_num", std::to_string(round_index)},
                                  {"history_summary", recent_history()}}));
  CriticReport report;
  auto read_side = [&](const char* key, CriticSideScores& side) {
    if (!doc.contains(key) || !doc[key].is_object()) return;
    const auto& s = doc[key];
    side.logic = clamp_unit(number_field(s, "logic").value_or(0.0));
    side.evidence = clamp_unit(number_field(s, "evidence").value_or(0.0));
    side.rebuttal = clamp_unit(number_field(s, "rebuttal").value_or(0.0));
    side.reasoning = s.value("reasoning", "");
  };
  read_side("plaintiff", report.plaintiff);
  read_side("defense", report.defense);
  if (doc.contains("unresolved_premises") &&
      doc["unresolved_premises"].is_array()) {
    for (const auto& p : doc["unresolved_premises"]) {
      if (p.is_string()) report.unresolved_premises.push_back(p.get<std::string>());
    }
  }
  if (doc.contains("recommendations")) {
    report.recommendations = doc["recommendations"];
  }
  const auto& resolved = doc["debate_resolved"];
  if (resolved.is_boolean()) {
    report.debate_resolved = resolved.get<bool>();
  } else if (resolved.is_string()) {
    report.debate_resolved = lower(resolved.get<std::string>()) == "true";
  }
  return report;
}

CourtSignal DebateOrchestrator::completion_check() {
  BackendReply reply = runtime_->invoke_user(
      RoleId::court,
      runtime_->prompts().render("court_completion_check",
                                 {{"history_summary", recent_history()}}));
  const std::string text = lower(reply.text);
  if (contains_word(text, "close")) return CourtSignal::Close;
  if (!contains_word(text, "wait")) {
    warnings_.push_back("court completion reply was neither Wait nor Close; "
                        "treated as Wait");
  }
  return CourtSignal::Wait;
}

DebateTranscript DebateOrchestrator::run(EvidencePool& pool) {
  if (!history_.empty()) throw Error("orchestrator instances are single-use");

  DebateTranscript transcript;
  transcript.claim_id = claim_->claim_id;

  std::optional<Termination> termination;
  for (int round_index = 1; round_index <= settings_.max_rounds; ++round_index) {
    DebateRound round;
    round.index = round_index;

    // 1. Evidence discovery, plaintiff first so pool admission order is
    // well-defined.
    round.prag_plaintiff = discovery_step(plaintiff_, pool, round_index);
    round.prag_defense = discovery_step(defense_, pool, round_index);

    // 2. Argument generation.
    round.plaintiff_argument = argument_step(plaintiff_, pool);
    plaintiff_.arguments.push_back(round.plaintiff_argument);
    push_history("Plaintiff Counsel", round.plaintiff_argument);

    round.defense_argument = argument_step(defense_, pool);
    defense_.arguments.push_back(round.defense_argument);
    push_history("Defense Counsel", round.defense_argument);

    // 3. Expert witness testimony.
    round.expert = expert_step(pool);
    if (round.expert && round.expert->granted) {
      push_history("Expert Witness (" + round.expert->persona + ")",
                   round.expert->text);
    }

    // 4. Self-reflection.
    round.plaintiff_reflection =
        reflection_step(plaintiff_, defense_, round_index);
    round.defense_reflection =
        reflection_step(defense_, plaintiff_, round_index);

    // 5. Critic evaluation, then the Court's completion check.
    round.critic = critic_step(round_index);
    round.court_signal = completion_check();

    transcript.rounds.push_back(std::move(round));
    const double total = transcript.rounds.back().plaintiff_reflection.total +
                         transcript.rounds.back().defense_reflection.total;
    transcript.reflection_totals.push_back(total);
    const double previous = transcript.reflection_totals.size() > 1
                                ? transcript.reflection_totals[
                                      transcript.reflection_totals.size() - 2]
                                : 0.0;
    transcript.reflection_deltas.push_back(std::fabs(total - previous));

    termination = check_termination(transcript.rounds,
                                    transcript.reflection_totals,
                                    executed_prag_, settings_.max_rounds);
    if (termination) break;
  }

  transcript.termination = termination.value_or(Termination::max_rounds);
  transcript.final_pool_size =
      pool.count(EvidenceStatus::admitted) + pool.count(EvidenceStatus::disputed);
  transcript.warnings = warnings_;
  return transcript;
}

RoleSwitchResult run_role_switch(const Claim& claim, const PremiseSet& premises,
                                 const CorpusIndex& store, Embedder& embedder,
                                 AgentRuntime& runtime,
                                 const EvidencePool& original_pool,
                                 const DebateTranscript& primary,
                                 DebateSettings switched_settings,
                                 EvidencePool& restored_pool_out) {
  // Full state reset: the switched debate starts from the pre-debate pool and
  // an empty history; only the counsel model bindings are exchanged.
  restored_pool_out = original_pool;
  runtime.swap_role_models(RoleId::plaintiff, RoleId::defense);

  DebateOrchestrator orchestrator(claim, premises, store, embedder, runtime,
                                  switched_settings);
  RoleSwitchResult result;
  result.switched = orchestrator.run(restored_pool_out);

  auto join_args = [](const std::vector<DebateRound>& rounds, bool plaintiff) {
    std::ostringstream out;
    for (const auto& round : rounds) {
      out << "Round " << round.index << ": "
          << (plaintiff ? round.plaintiff_argument : round.defense_argument)
          << "\n";
    }
    std::string text = out.str();
    return text.empty() ? std::string("(none)") : text;
  };

  // Agent A is the model that argued plaintiff in the primary debate and
  // defense after the switch; Agent B the converse.
  const std::string prompt = runtime.prompts().render(
      "consistency_analysis",
      {{"claim_text", claim.text},
       {"agent_a_original", join_args(primary.rounds, true)},
       {"agent_a_switched", join_args(result.switched.rounds, false)},
       {"agent_b_original", join_args(primary.rounds, false)},
       {"agent_b_switched", join_args(result.switched.rounds, true)}});
  try {
    nlohmann::json doc = runtime.invoke_user_json(RoleId::consistency, prompt);
    auto score = [&](const char* key) -> std::optional<double> {
      auto v = number_field(doc, key);
      if (!v) return std::nullopt;
      return std::clamp(*v, 0.0, 10.0);
    };
    result.agent_a_consistency = score("agent_a_consistency").value_or(6.0);
    result.agent_b_consistency = score("agent_b_consistency").value_or(6.0);
    if (auto overall = score("overall_consistency")) {
      result.overall_consistency = *overall;
    } else {
      result.overall_consistency =
          (result.agent_a_consistency + result.agent_b_consistency) / 2.0;
    }
    result.contradictions = doc.value("contradictions", "");
  } catch (const MalformedReply&) {
    result.parse_failed = true;
    result.agent_a_consistency = 6.0;
    result.agent_b_consistency = 6.0;
    result.overall_consistency = 6.0;  // neutral band, delta_rs stays 0
    runtime.note_warning(
        "consistency analyzer reply unparseable; gamma defaulted to 6.0");
  }
  return result;
}

}  // namespace delib
