#pragma once

#include <algorithm>
#include <array>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "kripkediag/hypothesis_types.hpp"
#include "kripkediag/reports.hpp"
#include "kripkediag/topology.hpp"
#include "kripkediag/vocabulary.hpp"

namespace kdiag::hypo {

using agents::FaultReport;

class UnclassifiableError : public std::runtime_error {
 public:
  explicit UnclassifiableError(const sim::PvId& pv)
      : std::runtime_error("no classification rule for PV '" + pv.name() + "'") {}
};

/// Source of classifications and causal theories for the agents.
class HypothesisGenerator {
 public:
  virtual ~HypothesisGenerator() = default;

  virtual Classification classify(const AnomalyContext& ctx) = 0;

  /// `reports` must be non-empty. `topology` is an optional hint.
  virtual CausalTheory theorize(std::span<const FaultReport> reports,
                                const agents::TopologyGraph* topology = nullptr) = 0;
};

namespace rules {

struct ClassificationRule {
  std::string_view subsystem;
  std::string_view signal;  // "*" matches any signal
  std::optional<Direction> direction;
  Subsystem result;
};

// First match wins.
inline constexpr std::array<ClassificationRule, 5> kClassificationTable = {{
    {"COOL", "*", std::nullopt, Subsystem::Cooling},
    {"RF", "klystron_output", std::nullopt, Subsystem::Klystron},
    {"RF", "forward_power", std::nullopt, Subsystem::Power},
    {"RF", "cavity_temp", Direction::Above, Subsystem::Cooling},  // overheating means lost cooling
    {"VAC", "pressure", std::nullopt, Subsystem::Vacuum},
}};

inline bool has_system(std::span<const FaultReport> reports, Subsystem s) {
  return std::any_of(reports.begin(), reports.end(), [&](const auto& r) { return r.system() == s; });
}

inline bool cooling_with_cavity_overheat(std::span<const FaultReport> reports) {
  static const sim::PvId kCavityTemp("RF:cavity_temp");
  for (const auto& a : reports) {
    if (a.system() != Subsystem::Cooling || a.pv() == kCavityTemp) continue;
    for (const auto& b : reports)
      if (b.system() == Subsystem::Cooling && b.pv() == kCavityTemp && b.agent() != a.agent()) return true;
  }
  return false;
}

struct TheoryRule {
  std::string_view name;
  std::function<bool(std::span<const FaultReport>)> matches;
  Proposition root;
  std::vector<Proposition> effects;
  std::string_view narrative;
};

/// Causal precedence, highest first. Vacuum never roots an RF effect.
inline const std::vector<TheoryRule>& theory_table() {
  static const std::vector<TheoryRule> table = {
      {"klystron_drives_forward_power",
       [](auto r) { return has_system(r, Subsystem::Klystron) && has_system(r, Subsystem::Power); },
       vocab::klystron_fault_reported,
       {vocab::rf_power_fault_reported},
       "klystron output loss propagates to RF forward power"},
      {"cooling_loss_overheats_cavity", cooling_with_cavity_overheat, vocab::cooling_fault_reported,
       {vocab::rf_overheat_reported},
       "cooling loop fault removes heat load capacity and the RF cavity overheats"},
  };
  return table;
}

}  // namespace rules

/// Deterministic table-driven classifier and theorizer.
class RuleBasedGenerator : public HypothesisGenerator {
 public:
  Classification classify(const AnomalyContext& ctx) override {
    for (const auto& rule : rules::kClassificationTable) {
      if (ctx.pv.subsystem() != rule.subsystem) continue;
      if (rule.signal != "*" && ctx.pv.signal() != rule.signal) continue;
      if (rule.direction && *rule.direction != ctx.direction) continue;
      return Classification{rule.result, GenerationSource::Rule, std::nullopt, std::nullopt};
    }
    throw UnclassifiableError(ctx.pv);
  }

  CausalTheory theorize(std::span<const FaultReport> reports,
                        const agents::TopologyGraph* = nullptr) override {
    if (reports.empty()) throw TheoryError("cannot theorize over an empty report list");
    for (const auto& rule : rules::theory_table())
      if (rule.matches(reports))
        return CausalTheory{rule.root, rule.effects, std::string(rule.narrative), GenerationSource::Rule,
                            std::nullopt};

    // No causal link applies: the earliest report stands alone, preferring
    // any non-vacuum report over a vacuum one.
    const FaultReport* pick = nullptr;
    auto key = [](const FaultReport& r) {
      return std::tuple(r.system() == Subsystem::Vacuum, r.tick(), r.agent(), r.pv());
    };
    for (const auto& r : reports)
      if (!pick || key(r) < key(*pick)) pick = &r;
    return CausalTheory{pick->proposition(), {},
                        "isolated " + std::string(to_string(pick->system())) + " fault reported by " +
                            pick->agent(),
                        GenerationSource::Rule, std::nullopt};
  }
};

enum class LmErrorKind { MalformedJson, MissingKey, OutOfVocabulary, InvalidTheory };

inline const char* to_string(LmErrorKind k) {
  switch (k) {
    case LmErrorKind::MalformedJson: return "malformed_json";
    case LmErrorKind::MissingKey: return "missing_key";
    case LmErrorKind::OutOfVocabulary: return "out_of_vocabulary";
    case LmErrorKind::InvalidTheory: return "invalid_theory";
  }
  return "?";
}

class LmResponseError : public std::runtime_error {
 public:
  LmResponseError(LmErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}
  LmErrorKind kind() const noexcept { return kind_; }

 private:
  LmErrorKind kind_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Accepts bare JSON or exactly one ``` fenced block (optionally tagged).
inline nlohmann::json parse_reply_object(std::string_view text) {
  std::string_view body = trim(text);
  if (body.starts_with("```")) {
    auto nl = body.find('\n');
    if (nl == std::string_view::npos || !body.ends_with("```") || body.size() < nl + 4)
      throw LmResponseError(LmErrorKind::MalformedJson, "unterminated code fence");
    body = body.substr(nl + 1, body.size() - nl - 4);
  }
  if (body.find("```") != std::string_view::npos)
    throw LmResponseError(LmErrorKind::MalformedJson, "more than one code fence");
  auto j = nlohmann::json::parse(body.begin(), body.end(), nullptr, false);
  if (j.is_discarded()) throw LmResponseError(LmErrorKind::MalformedJson, "reply is not valid JSON");
  if (!j.is_object()) throw LmResponseError(LmErrorKind::MalformedJson, "reply is not a JSON object");
  return j;
}

inline Proposition vocabulary_atom(const nlohmann::json& value, const std::set<Proposition>& vocabulary) {
  if (!value.is_string())
    throw LmResponseError(LmErrorKind::OutOfVocabulary, "proposition must be a string");
  const auto name = value.get<std::string>();
  if (!modal::is_identifier(name) || !vocabulary.contains(Proposition(name)))
    throw LmResponseError(LmErrorKind::OutOfVocabulary, "'" + name + "' is not a known proposition");
  return Proposition(name);
}

}  // namespace detail

/// Parses a classification reply: a JSON object whose `suspected_system` is
/// one of Cooling, Power, Vacuum, Klystron.
inline Classification parse_lm_response(std::string_view text) {
  auto j = detail::parse_reply_object(text);
  auto it = j.find("suspected_system");
  if (it == j.end()) throw LmResponseError(LmErrorKind::MissingKey, "no 'suspected_system' key");
  if (!it->is_string())
    throw LmResponseError(LmErrorKind::OutOfVocabulary, "'suspected_system' must be a string");
  auto system = subsystem_from_string(it->get<std::string>());
  if (!system)
    throw LmResponseError(LmErrorKind::OutOfVocabulary, "'" + it->get<std::string>() + "' is not a known subsystem");
  return Classification{*system, GenerationSource::Remote, std::string(text), std::nullopt};
}

/// Parses a theory reply: {"root_cause": atom, "effects": [atom, ...]}.
inline CausalTheory parse_theory_response(std::string_view text) {
  auto j = detail::parse_reply_object(text);
  if (!j.contains("root_cause")) throw LmResponseError(LmErrorKind::MissingKey, "no 'root_cause' key");
  if (!j.contains("effects")) throw LmResponseError(LmErrorKind::MissingKey, "no 'effects' key");
  if (!j["effects"].is_array()) throw LmResponseError(LmErrorKind::MalformedJson, "'effects' must be an array");

  const auto vocabulary = vocab::global_vocabulary();
  CausalTheory theory{detail::vocabulary_atom(j["root_cause"], vocabulary), {}, {}, GenerationSource::Remote,
                      std::nullopt};
  for (const auto& e : j["effects"]) theory.effects.push_back(detail::vocabulary_atom(e, vocabulary));
  if (j.contains("narrative") && j["narrative"].is_string()) theory.narrative = j["narrative"].get<std::string>();
  try {
    validate(theory);
  } catch (const TheoryError& e) {
    throw LmResponseError(LmErrorKind::InvalidTheory, e.what());
  }
  return theory;
}

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChatRequest {
  std::string system;
  std::string user;
};

/// One blocking request/response exchange with a chat-style model.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

struct RemotePrompts {
  std::string classify_system;
  std::string theorize_system;
};

inline RemotePrompts load_prompts(const std::string& dir) {
  auto read = [&](const std::string& name) {
    std::ifstream in(dir + "/" + name, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read prompt template '" + dir + "/" + name + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  return RemotePrompts{read("classify_system.txt"), read("theorize_system.txt")};
}

inline nlohmann::json to_json(const AnomalyContext& ctx) {
  return {{"pv", ctx.pv.name()},       {"tick", ctx.tick},           {"observed", ctx.observed},
          {"baseline", ctx.baseline}, {"deviation", ctx.deviation}, {"direction", to_string(ctx.direction)}};
}

struct AttemptRecord {
  std::string operation;  // "classify" or "theorize"
  int attempt = 0;
  std::optional<std::string> raw_response;
  std::string outcome;  // "ok" or the error message
};

/// Language-model backed generator. Every reply is validated against the
/// closed vocabulary; after `max_retries` failed retries it falls back to
/// the rule table and records why.
class RemoteGenerator : public HypothesisGenerator {
 public:
  RemoteGenerator(ChatTransport& transport, RemotePrompts prompts, int max_retries = 2)
      : transport_(transport), prompts_(std::move(prompts)), max_retries_(max_retries) {}

  Classification classify(const AnomalyContext& ctx) override {
    const ChatRequest request{prompts_.classify_system, to_json(ctx).dump()};
    std::optional<std::string> last_reply;
    std::string last_error;
    for (int attempt = 0; attempt <= max_retries_; ++attempt) {
      std::optional<std::string> reply;
      try {
        reply = transport_.complete(request);
        auto c = parse_lm_response(*reply);
        attempts_.push_back({"classify", attempt, reply, "ok"});
        return c;
      } catch (const LmResponseError& e) {
        last_error = e.what();
      } catch (const TransportError& e) {
        last_error = std::string("transport: ") + e.what();
      }
      attempts_.push_back({"classify", attempt, reply, last_error});
      if (reply) last_reply = reply;
    }
    auto c = fallback_.classify(ctx);
    c.raw_response = last_reply;
    c.fallback_reason = last_error;
    return c;
  }

  CausalTheory theorize(std::span<const FaultReport> reports,
                        const agents::TopologyGraph* topology = nullptr) override {
    if (reports.empty()) throw TheoryError("cannot theorize over an empty report list");
    nlohmann::json payload;
    payload["reports"] = nlohmann::json::array();
    for (const auto& r : reports)
      payload["reports"].push_back({{"agent", r.agent()},
                                    {"tick", r.tick()},
                                    {"pv", r.pv().name()},
                                    {"suspected_system", to_string(r.system())},
                                    {"proposition", r.proposition().name()}});
    payload["vocabulary"] = nlohmann::json::array();
    for (const auto& p : vocab::global_vocabulary()) payload["vocabulary"].push_back(p.name());
    if (topology) payload["topology"] = agents::to_json(*topology);
    const ChatRequest request{prompts_.theorize_system, payload.dump()};

    std::string last_error;
    for (int attempt = 0; attempt <= max_retries_; ++attempt) {
      std::optional<std::string> reply;
      try {
        reply = transport_.complete(request);
        auto theory = parse_theory_response(*reply);
        attempts_.push_back({"theorize", attempt, reply, "ok"});
        return theory;
      } catch (const LmResponseError& e) {
        last_error = e.what();
      } catch (const TransportError& e) {
        last_error = std::string("transport: ") + e.what();
      }
      attempts_.push_back({"theorize", attempt, reply, last_error});
    }
    auto theory = fallback_.theorize(reports, topology);
    theory.fallback_reason = last_error;
    return theory;
  }

  const std::vector<AttemptRecord>& attempts() const noexcept { return attempts_; }

 private:
  ChatTransport& transport_;
  RemotePrompts prompts_;
  int max_retries_;
  RuleBasedGenerator fallback_;
  std::vector<AttemptRecord> attempts_;
};

}  // namespace kdiag::hypo
