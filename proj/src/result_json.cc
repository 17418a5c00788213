#include "parsetalk/json_io.h"

namespace parsetalk {

nlohmann::json ToJson(const InterpretationGraph& graph) {
  nlohmann::json instances = nlohmann::json::array();
  for (const auto& n : graph.nodes) {
    instances.push_back({{"instance", n.instance}, {"concept", n.concept_name}});
  }
  nlohmann::json assertions = nlohmann::json::array();
  for (const auto& t : graph.triples) {
    assertions.push_back({{"subject", t.subject}, {"role", t.role}, {"filler", t.filler}});
  }
  return {{"instances", instances}, {"assertions", assertions}};
}

nlohmann::json ToJson(const Analysis& analysis) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : analysis.edges) {
    nlohmann::json head = e.head < 0 ? nlohmann::json(nullptr) : nlohmann::json(e.head);
    nlohmann::json mod = e.modifier < 0 ? nlohmann::json(nullptr) : nlohmann::json(e.modifier);
    edges.push_back({{"head", head}, {"modifier", mod}, {"label", e.label}});
  }
  nlohmann::json out = {{"edges", edges},
                        {"interpretation", ToJson(analysis.interpretation)},
                        {"coverage", analysis.coverage},
                        {"root", analysis.root < 0 ? nlohmann::json(nullptr)
                                                   : nlohmann::json(analysis.root)}};
  if (analysis.deferred) out["deferred"] = true;
  if (!analysis.well_formed) out["well_formed"] = false;
  return out;
}

nlohmann::json ToJson(const MetricsRecord& m, bool with_wall_time) {
  nlohmann::json out = {{"syntax_checks", m.syntax_checks()},
                        {"concept_checks", m.concept_checks()},
                        {"anaphora_concept_checks", m.anaphora_concept_checks()},
                        {"backtracks", m.backtrack_events()},
                        {"skipped_tokens", m.skipped_tokens()},
                        {"complete", m.complete}};
  if (with_wall_time) {
    out["wall_ms"] = std::chrono::duration<double, std::milli>(m.wall_time).count();
  }
  return out;
}

nlohmann::json ToJson(const ParseResult& result, bool with_wall_time) {
  nlohmann::json analyses = nlohmann::json::array();
  for (const auto& a : result.analyses) analyses.push_back(ToJson(a));
  nlohmann::json out = {{"analyses", analyses},
                        {"skipped", result.skipped},
                        {"complete", result.complete},
                        {"metrics", ToJson(result.metrics, with_wall_time)}};
  if (result.failure) out["failure"] = *result.failure;
  if (!result.warnings.empty()) out["warnings"] = result.warnings;
  if (!result.trace.empty()) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& e : result.trace) trace.push_back(TraceLine(e));
    out["trace"] = trace;
  }
  return out;
}

std::string TraceLine(const TraceEvent& e) {
  return std::to_string(e.seq) + "," + e.type + "," + e.from + "," + e.to + "," + e.outcome;
}

}  // namespace parsetalk
