#include "parsetalk/text_level.h"

#include <algorithm>

namespace parsetalk {

namespace {

bool IsNominal(const Grammar& grammar, const std::string& class_name) {
  if (!grammar.FindClass("Nominal")) return false;
  return grammar.ClassSubsumes("Nominal", class_name);
}

FeatureStructure NumberOf(const FeatureStructure& fs) {
  FeatureStructure out;
  if (auto num = fs.Get("num")) out.Set("num", *num);
  return out;
}

}  // namespace

int RoleRank(std::string_view label) {
  if (label == "subj") return 0;
  if (label == "obj") return 1;
  return 2;
}

void RankReferents(std::vector<DiscourseReferent>& referents) {
  std::stable_sort(referents.begin(), referents.end(),
                   [](const DiscourseReferent& a, const DiscourseReferent& b) {
                     const int ra = RoleRank(a.role);
                     const int rb = RoleRank(b.role);
                     if (ra != rb) return ra < rb;
                     return a.token < b.token;
                   });
}

std::vector<DiscourseReferent> ReferentsOf(const Analysis& analysis, int utterance,
                                           const Grammar& grammar,
                                           const std::map<InstanceId, InstanceId>& identity) {
  std::vector<DiscourseReferent> out;
  for (const auto& w : analysis.words) {
    if (w.placeholder || !w.instance || !w.concept_id) continue;
    if (!IsNominal(grammar, w.word_class)) continue;
    DiscourseReferent r;
    auto it = identity.find(*w.instance);
    r.instance = it == identity.end() ? *w.instance : it->second;
    r.concept_id = *w.concept_id;
    r.utterance = utterance;
    r.token = w.position;
    r.surface = w.surface;
    r.features = w.features;
    r.role = w.label;
    out.push_back(std::move(r));
  }
  RankReferents(out);
  return out;
}

CenteringState UpdateCenters(const std::vector<DiscourseReferent>& realized,
                             const CenteringState& previous) {
  CenteringState next;
  next.cf = realized;
  RankReferents(next.cf);
  for (const auto& old : previous.cf) {
    const bool present = std::any_of(realized.begin(), realized.end(), [&](const auto& r) {
      return r.instance == old.instance;
    });
    if (present) {
      next.cb = old;
      break;
    }
  }
  return next;
}

std::vector<int> DefiniteNominals(const Analysis& analysis, const Grammar& grammar) {
  std::vector<int> out;
  for (size_t i = 0; i < analysis.words.size(); ++i) {
    const AnalysisWord& w = analysis.words[i];
    if (w.placeholder || !IsNominal(grammar, w.word_class)) continue;
    const bool definite =
        std::any_of(analysis.words.begin(), analysis.words.end(), [&](const AnalysisWord& m) {
          return m.head && *m.head == w.position && m.features.Get("def") == "+";
        });
    if (definite) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::optional<DiscourseReferent> SearchNomAntecedent(const AnalysisWord& anaphor,
                                                     const CenteringState& state,
                                                     const KnowledgeBase& kb,
                                                     MetricsRecord& metrics) {
  if (!anaphor.concept_id) return std::nullopt;
  for (const auto& candidate : state.cf) {
    if (!FeatureStructure::Unify(NumberOf(anaphor.features), NumberOf(candidate.features))) {
      continue;
    }
    metrics.CountAnaphoraConceptCheck();
    if (kb.terminology().Subsumes(*anaphor.concept_id, candidate.concept_id)) return candidate;
  }
  return std::nullopt;
}

ContextId ResolveAnaphor(KnowledgeBase& kb, ContextId ctx, InstanceId anaphor,
                         InstanceId antecedent) {
  return kb.SubstituteInstance(ctx, anaphor, antecedent);
}

std::vector<std::vector<std::string>> SplitUtterances(std::span<const std::string> tokens) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> cur;
  for (const auto& t : tokens) {
    if (t == "." || t == "!" || t == "?") {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(t);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

TextResult ParseText(std::string_view text, const Grammar& grammar, KnowledgeBase& kb,
                     const ParseConfig& config) {
  TextResult result;
  const auto tokens = Tokenize(text);
  result.utterances = SplitUtterances(tokens);
  CenteringState state;
  std::optional<ContextId> text_ctx;
  for (size_t u = 0; u < result.utterances.size(); ++u) {
    ParseResult parsed = Parse(result.utterances[u], grammar, kb, config);
    result.metrics.Accumulate(parsed.metrics);
    result.parses.push_back(parsed);
    if (parsed.analyses.empty()) {
      state = UpdateCenters({}, state);
      result.states.push_back(state);
      continue;
    }
    const Analysis& chosen = parsed.analyses.front();
    text_ctx = text_ctx ? kb.MergeContexts(*text_ctx, chosen.context) : chosen.context;
    std::map<InstanceId, InstanceId> identity;
    for (int idx : DefiniteNominals(chosen, grammar)) {
      const AnalysisWord& word = chosen.words[idx];
      auto antecedent = SearchNomAntecedent(word, state, kb, result.metrics);
      ResolutionRecord record{static_cast<int>(u), word.position, std::nullopt, std::nullopt};
      if (antecedent && word.instance) {
        record.antecedent_utterance = antecedent->utterance;
        record.antecedent_token = antecedent->token;
        identity[*word.instance] = antecedent->instance;
        text_ctx = ResolveAnaphor(kb, *text_ctx, *word.instance, antecedent->instance);
      }
      result.resolutions.push_back(record);
    }
    state = UpdateCenters(ReferentsOf(chosen, static_cast<int>(u), grammar, identity), state);
    result.states.push_back(state);
  }
  result.metrics.complete =
      !result.parses.empty() &&
      std::all_of(result.parses.begin(), result.parses.end(),
                  [](const ParseResult& r) { return r.complete; });
  result.text_context = text_ctx.value_or(kb.root_context());
  result.interpretation = kb.ExtractInterpretation(result.text_context);
  return result;
}

}  // namespace parsetalk
