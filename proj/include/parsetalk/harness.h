#ifndef PARSETALK_HARNESS_H_
#define PARSETALK_HARNESS_H_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "parsetalk/chart.h"
#include "parsetalk/engine.h"
#include "parsetalk/metrics.h"

namespace parsetalk {

enum class SystemKind { kEngineRestricted, kEngineExhaustive, kChartStandard, kChartDiscontinuous };

class HarnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string SystemName(SystemKind kind);
SystemKind ParseSystemName(std::string_view name);  // throws HarnessError
// Comma-separated list.
std::vector<SystemKind> ParseSystemList(std::string_view list);

// One sentence per line; blank lines and lines starting with '#' are ignored.
std::vector<std::string> LoadCorpus(const std::filesystem::path& path);

struct HarnessConfig {
  ParseConfig engine;
  ChartConfig chart;
  // Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

struct MetricsCell {
  int sentence_id = 0;  // 1-based
  int tokens = 0;
  SystemKind system = SystemKind::kEngineRestricted;
  // Absent when the system failed on this sentence.
  std::optional<MetricsRecord> metrics;
  std::optional<std::string> failure;
};

struct MetricsTable {
  std::vector<SystemKind> systems;
  // Sentence-major, systems in the order requested.
  std::vector<MetricsCell> cells;
  // Run-level counters per system, fed by every cell as it finishes.
  std::vector<MetricsRecord> totals;

  const MetricsCell* Find(int sentence_id, SystemKind system) const;
};

// Runs one system on one tokenized sentence against a fresh copy of `kb`.
ParseResult RunSystem(SystemKind system, std::span<const std::string> tokens,
                      const Grammar& grammar, const KnowledgeBase& kb, const HarnessConfig& config);

MetricsTable RunCorpus(const std::vector<std::string>& sentences, const Grammar& grammar,
                       const KnowledgeBase& kb, const std::vector<SystemKind>& systems,
                       const HarnessConfig& config);

// wall_ms stays empty unless `with_timing`, keeping reruns byte-identical.
std::string ToCsv(const MetricsTable& table, bool with_timing = false);
nlohmann::json ToPlotData(const MetricsTable& table);

struct ReductionFactor {
  double syntax_checks = 0;
  double concept_checks = 0;
  size_t syntax_sentences = 0;
  size_t concept_sentences = 0;
};

// Unweighted mean over sentences of numerator/denominator counts. Sentences
// where either cell is absent, or the denominator is zero, are left out.
ReductionFactor ComputeReduction(const MetricsTable& table, SystemKind numerator,
                                 SystemKind denominator);

// Writes metrics.csv, plotdata.json and summary.json into `dir`.
void WriteReport(const MetricsTable& table, const std::filesystem::path& dir,
                 bool with_timing = false);

}  // namespace parsetalk

#endif  // PARSETALK_HARNESS_H_
