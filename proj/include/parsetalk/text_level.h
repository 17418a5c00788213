#ifndef PARSETALK_TEXT_LEVEL_H_
#define PARSETALK_TEXT_LEVEL_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "parsetalk/engine.h"
#include "parsetalk/feature_structure.h"
#include "parsetalk/parse_result.h"
#include "parsetalk/term_kb.h"

namespace parsetalk {

struct DiscourseReferent {
  InstanceId instance = -1;
  ConceptId concept_id = 0;
  int utterance = 0;
  int token = 0;
  std::string surface;
  FeatureStructure features;
  // Grammatical role used for ranking: "subj", "obj" or something else.
  std::string role;
};

struct CenteringState {
  std::optional<DiscourseReferent> cb;
  std::vector<DiscourseReferent> cf;
};

// 0 for subjects, 1 for direct objects, 2 otherwise.
int RoleRank(std::string_view label);
// Orders referents by role rank, then token position.
void RankReferents(std::vector<DiscourseReferent>& referents);

// Nominal words of `analysis` that carry a referent, ranked. `identity`
// rewrites instance ids (anaphor to antecedent) before anything else looks
// at them.
std::vector<DiscourseReferent> ReferentsOf(const Analysis& analysis, int utterance,
                                           const Grammar& grammar,
                                           const std::map<InstanceId, InstanceId>& identity = {});

CenteringState UpdateCenters(const std::vector<DiscourseReferent>& realized,
                             const CenteringState& previous);

// Definite nominals: nominal words with a determiner-type modifier whose
// features say def:+.
std::vector<int> DefiniteNominals(const Analysis& analysis, const Grammar& grammar);

// SEARCHNOMANTECEDENT: the first member of cf agreeing in number with the
// anaphor whose concept is subsumed by the anaphor's concept. Each conceptual
// test counts as an anaphora concept check.
std::optional<DiscourseReferent> SearchNomAntecedent(const AnalysisWord& anaphor,
                                                     const CenteringState& state,
                                                     const KnowledgeBase& kb,
                                                     MetricsRecord& metrics);

// Replaces the anaphor's referent by the antecedent's in `ctx`.
ContextId ResolveAnaphor(KnowledgeBase& kb, ContextId ctx, InstanceId anaphor,
                         InstanceId antecedent);

struct ResolutionRecord {
  int utterance = 0;
  int token = 0;
  std::optional<int> antecedent_utterance;
  std::optional<int> antecedent_token;
};

struct TextResult {
  std::vector<std::vector<std::string>> utterances;
  std::vector<ParseResult> parses;
  std::vector<ResolutionRecord> resolutions;
  // Centering state after each utterance.
  std::vector<CenteringState> states;
  ContextId text_context = 0;
  InterpretationGraph interpretation;
  MetricsRecord metrics;
};

// Splits at sentence-final punctuation; the punctuation token is dropped.
std::vector<std::vector<std::string>> SplitUtterances(std::span<const std::string> tokens);

TextResult ParseText(std::string_view text, const Grammar& grammar, KnowledgeBase& kb,
                     const ParseConfig& config);

}  // namespace parsetalk

#endif  // PARSETALK_TEXT_LEVEL_H_
