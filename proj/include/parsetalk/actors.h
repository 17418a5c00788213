#ifndef PARSETALK_ACTORS_H_
#define PARSETALK_ACTORS_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "parsetalk/feature_structure.h"
#include "parsetalk/grammar.h"
#include "parsetalk/metrics.h"
#include "parsetalk/term_kb.h"

namespace parsetalk {

using WordUid = int;
using ContainerId = int;

struct DependencyEdge {
  int head = -1;
  int modifier = -1;
  std::string label;
  friend auto operator<=>(const DependencyEdge&, const DependencyEdge&) = default;
};

struct HeadLink {
  WordUid head = -1;
  std::string label;
};

struct WordActor {
  WordUid uid = -1;
  LexemeId lexeme = -1;  // -1 for placeholders and unknown tokens
  std::string surface;
  int position = 0;
  // Textual order used for direction checks. Real words sit at 4*position+2.
  // A placeholder for a word still to come sits beyond every real word; one
  // for an earlier word sits just before its predictor.
  int order_key = 2;
  ClassId word_class = 0;
  FeatureStructure features;
  std::map<std::string, WordUid> filled;
  std::optional<HeadLink> head;
  std::optional<InstanceRef> instance;
  std::optional<ConceptId> concept_id;
  bool placeholder = false;

  bool IsRoot() const { return !head.has_value(); }
  static constexpr int kFutureOrderKey = 1 << 28;
  static int OrderKeyFor(int position) { return 4 * position + 2; }
};

// Builds the word actor for one lexeme reading at `position`. No KB instance
// is created here.
WordActor MakeWordActor(const Grammar& grammar, LexemeId lexeme, int position, WordUid uid);
WordActor MakeUnknownWordActor(const Grammar& grammar, std::string surface, int position,
                               WordUid uid);
// Placeholder for a predicted word of class `predicted`.
WordActor MakePlaceholder(const Grammar& grammar, ClassId predicted, int position, int order_key,
                          WordUid uid);

// Valency frame a word offers as head. Placeholders offer the frame of their
// class extended by all subclass valencies.
const std::vector<Valency>& FrameOf(const Grammar& grammar, const WordActor& word);

// SYNTAXCHECK: counts exactly one call in `metrics`, then tests that `v` is
// unfilled on `head`, the modifier class is subsumed by the valency target
// (for a placeholder modifier, either class may subsume the other),
// the modifier features unify with the valency constraint and the modifier
// lies on the side of the head required by `v`.
bool SyntaxCheck(const Grammar& grammar, const WordActor& head, const WordActor& modifier,
                 const Valency& v, MetricsRecord& metrics);

struct PhraseActor {
  std::vector<WordActor> words;  // sorted by order_key
  WordUid active_head = -1;
  ContextId context = 0;
  std::vector<int> coverage;  // sorted token positions, placeholders excluded
  bool deferred = false;

  const WordActor* Find(WordUid uid) const;
  WordActor* Find(WordUid uid);
  const WordActor& root() const { return *Find(active_head); }

  // Chain from the root following, at each node, its rightmost dependent
  // among those to its right.
  std::vector<WordUid> RightRim() const;
  // Dependency triples by token position; placeholders appear as -1.
  std::vector<DependencyEdge> Edges() const;
  bool HasPlaceholder() const;
  // True when every word's mandatory valencies are filled and no placeholder
  // remains.
  bool IsWellFormed(const Grammar& grammar) const;
  // The nearest real words on either side of `token` (which lies in a gap of
  // the coverage), together with their heads up to the root.
  std::vector<WordUid> DiscontinuityWords(int token) const;
  // Identity of the analysis: coverage, readings and edges.
  std::string Key() const;
  void SortWords();
};

struct ContainerActor {
  ContainerId id = -1;
  std::vector<PhraseActor> phrases;
  std::optional<ContainerId> textual_predecessor;
  // Head portion of the analysis this container extends.
  std::optional<ContainerId> historical_predecessor;
  // Modifying portion; only retained when memoization pruning is off.
  std::optional<ContainerId> historical_modifier;
  std::optional<ContainerId> deferred;
  std::vector<int> coverage;
  bool is_barrier = false;
  bool skipped = false;

  int rightmost() const { return coverage.empty() ? -1 : coverage.back(); }
};

std::string ContainerName(ContainerId id);

}  // namespace parsetalk

#endif  // PARSETALK_ACTORS_H_
