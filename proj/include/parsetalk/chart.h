#ifndef PARSETALK_CHART_H_
#define PARSETALK_CHART_H_

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "parsetalk/grammar.h"
#include "parsetalk/parse_result.h"
#include "parsetalk/term_kb.h"

namespace parsetalk {

enum class ChartVariant { kStandard, kDiscontinuous };

struct ChartConfig {
  ChartVariant variant = ChartVariant::kStandard;
  size_t edge_ceiling = 100000;
  // Discontinuous variant: maximum number of gaps inside one edge's coverage.
  int max_gaps = 2;
  std::optional<std::chrono::milliseconds> timeout;
};

// Number of maximal runs of uncovered positions strictly inside a coverage
// bit set.
int GapCount(uint64_t coverage);

// Active chart parser over the same grammar and checks as the engine. Every
// reading is a separate edge with its own interpretation context. Sentences
// longer than 64 tokens are rejected.
ParseResult ChartParse(std::span<const std::string> tokens, const Grammar& grammar,
                       KnowledgeBase& kb, const ChartConfig& config);

}  // namespace parsetalk

#endif  // PARSETALK_CHART_H_
