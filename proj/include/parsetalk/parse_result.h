#ifndef PARSETALK_PARSE_RESULT_H_
#define PARSETALK_PARSE_RESULT_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "parsetalk/actors.h"
#include "parsetalk/metrics.h"
#include "parsetalk/scheduler.h"
#include "parsetalk/term_kb.h"

namespace parsetalk {

struct AnalysisWord {
  int position = -1;  // -1 for an unfilled placeholder
  std::string surface;
  std::string word_class;
  FeatureStructure features;
  std::optional<InstanceId> instance;
  std::optional<ConceptId> concept_id;
  std::optional<int> head;  // token position of the head
  std::string label;        // valency label of the head link
  bool placeholder = false;
};

struct Analysis {
  std::vector<DependencyEdge> edges;
  InterpretationGraph interpretation;
  std::vector<int> coverage;
  std::vector<AnalysisWord> words;
  int root = -1;
  ContextId context = 0;
  bool deferred = false;
  bool well_formed = true;
};

// Raised inside a parser when a configured resource bound (edge or phrase
// ceiling, deadline) is hit. Parse entry points convert it into
// ParseResult::failure.
class ResourceExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Analysis MakeAnalysis(const PhraseActor& phrase, const Grammar& grammar, const KnowledgeBase& kb);

struct ParseResult {
  std::vector<Analysis> analyses;
  std::vector<int> skipped;
  bool complete = false;
  MetricsRecord metrics;
  // Set when the run was aborted (resource ceiling or timeout); analyses are
  // then empty.
  std::optional<std::string> failure;
  std::vector<std::string> warnings;
  std::vector<TraceEvent> trace;
};

}  // namespace parsetalk

#endif  // PARSETALK_PARSE_RESULT_H_
