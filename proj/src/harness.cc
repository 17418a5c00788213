#include "parsetalk/harness.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "parsetalk/json_io.h"

namespace parsetalk {

std::string SystemName(SystemKind kind) {
  switch (kind) {
    case SystemKind::kEngineRestricted:
      return "engine-restricted";
    case SystemKind::kEngineExhaustive:
      return "engine-exhaustive";
    case SystemKind::kChartStandard:
      return "chart-standard";
    case SystemKind::kChartDiscontinuous:
      return "chart-discontinuous";
  }
  return "?";
}

SystemKind ParseSystemName(std::string_view name) {
  for (auto kind : {SystemKind::kEngineRestricted, SystemKind::kEngineExhaustive,
                    SystemKind::kChartStandard, SystemKind::kChartDiscontinuous}) {
    if (SystemName(kind) == name) return kind;
  }
  throw HarnessError("unknown system '" + std::string(name) +
                     "' (expected engine-restricted, engine-exhaustive, chart-standard or "
                     "chart-discontinuous)");
}

std::vector<SystemKind> ParseSystemList(std::string_view list) {
  std::vector<SystemKind> out;
  std::stringstream in{std::string(list)};
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(ParseSystemName(item));
  }
  if (out.empty()) throw HarnessError("no systems given");
  return out;
}

std::vector<std::string> LoadCorpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw HarnessError("cannot open corpus " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(first, last - first + 1));
  }
  return out;
}

const MetricsCell* MetricsTable::Find(int sentence_id, SystemKind system) const {
  for (const auto& c : cells) {
    if (c.sentence_id == sentence_id && c.system == system) return &c;
  }
  return nullptr;
}

ParseResult RunSystem(SystemKind system, std::span<const std::string> tokens,
                      const Grammar& grammar, const KnowledgeBase& kb, const HarnessConfig& config) {
  KnowledgeBase fresh = kb.Fresh();
  switch (system) {
    case SystemKind::kEngineRestricted: {
      ParseConfig c = config.engine;
      c.mode = ParseMode::kRestricted;
      return Parse(tokens, grammar, fresh, c);
    }
    case SystemKind::kEngineExhaustive: {
      ParseConfig c = config.engine;
      c.mode = ParseMode::kExhaustive;
      return Parse(tokens, grammar, fresh, c);
    }
    case SystemKind::kChartStandard: {
      ChartConfig c = config.chart;
      c.variant = ChartVariant::kStandard;
      return ChartParse(tokens, grammar, fresh, c);
    }
    case SystemKind::kChartDiscontinuous: {
      ChartConfig c = config.chart;
      c.variant = ChartVariant::kDiscontinuous;
      return ChartParse(tokens, grammar, fresh, c);
    }
  }
  throw HarnessError("unknown system");
}

MetricsTable RunCorpus(const std::vector<std::string>& sentences, const Grammar& grammar,
                       const KnowledgeBase& kb, const std::vector<SystemKind>& systems,
                       const HarnessConfig& config) {
  MetricsTable table;
  table.systems = systems;
  table.totals.resize(systems.size());
  std::vector<std::vector<std::string>> tokenized;
  for (const auto& s : sentences) tokenized.push_back(Tokenize(s));
  for (size_t i = 0; i < sentences.size(); ++i) {
    for (auto system : systems) {
      MetricsCell cell;
      cell.sentence_id = static_cast<int>(i) + 1;
      cell.tokens = static_cast<int>(tokenized[i].size());
      cell.system = system;
      table.cells.push_back(std::move(cell));
    }
  }
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t k = next++; k < table.cells.size(); k = next++) {
      MetricsCell& cell = table.cells[k];
      const size_t sys_index = k % systems.size();
      try {
        ParseResult r = RunSystem(cell.system, tokenized[cell.sentence_id - 1], grammar, kb, config);
        if (r.failure) {
          cell.failure = r.failure;
        } else {
          cell.metrics = r.metrics;
          table.totals[sys_index].Accumulate(r.metrics);
        }
      } catch (const std::exception& e) {
        cell.failure = e.what();
      }
    }
  };
  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<size_t>(1, table.cells.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return table;
}

std::string ToCsv(const MetricsTable& table, bool with_timing) {
  std::ostringstream out;
  out << "sentence_id,tokens,system,syntax_checks,concept_checks,backtracks,skipped,complete,"
         "wall_ms\n";
  for (const auto& c : table.cells) {
    out << c.sentence_id << ',' << c.tokens << ',' << SystemName(c.system) << ',';
    if (c.metrics) {
      const MetricsRecord& m = *c.metrics;
      out << m.syntax_checks() << ',' << m.concept_checks() << ',' << m.backtrack_events() << ','
          << m.skipped_tokens() << ',' << (m.complete ? "true" : "false") << ',';
      if (with_timing) {
        out << std::chrono::duration<double, std::milli>(m.wall_time).count();
      }
    } else {
      out << ",,,,,";
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::json ToPlotData(const MetricsTable& table) {
  nlohmann::json series = nlohmann::json::array();
  for (const char* check : {"syntax_checks", "concept_checks"}) {
    for (auto system : table.systems) {
      nlohmann::json points = nlohmann::json::array();
      for (const auto& c : table.cells) {
        if (c.system != system) continue;
        nlohmann::json y = nullptr;
        if (c.metrics) {
          y = std::string(check) == "syntax_checks" ? c.metrics->syntax_checks()
                                                    : c.metrics->concept_checks();
        }
        points.push_back({{"x", c.sentence_id}, {"y", y}});
      }
      series.push_back({{"check", check}, {"system", SystemName(system)}, {"points", points}});
    }
  }
  return {{"x_label", "sentence_id"}, {"y_label", "calls"}, {"series", series}};
}

ReductionFactor ComputeReduction(const MetricsTable& table, SystemKind numerator,
                                 SystemKind denominator) {
  ReductionFactor out;
  int max_id = 0;
  for (const auto& c : table.cells) max_id = std::max(max_id, c.sentence_id);
  for (int id = 1; id <= max_id; ++id) {
    const MetricsCell* num = table.Find(id, numerator);
    const MetricsCell* den = table.Find(id, denominator);
    if (!num || !den || !num->metrics || !den->metrics) continue;
    if (den->metrics->syntax_checks() > 0) {
      out.syntax_checks += static_cast<double>(num->metrics->syntax_checks()) /
                           static_cast<double>(den->metrics->syntax_checks());
      ++out.syntax_sentences;
    }
    if (den->metrics->concept_checks() > 0) {
      out.concept_checks += static_cast<double>(num->metrics->concept_checks()) /
                            static_cast<double>(den->metrics->concept_checks());
      ++out.concept_sentences;
    }
  }
  if (out.syntax_sentences) out.syntax_checks /= static_cast<double>(out.syntax_sentences);
  if (out.concept_sentences) out.concept_checks /= static_cast<double>(out.concept_sentences);
  return out;
}

void WriteReport(const MetricsTable& table, const std::filesystem::path& dir, bool with_timing) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw HarnessError("cannot create " + dir.string() + ": " + ec.message());
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw HarnessError("cannot write " + (dir / name).string());
    out << text;
    if (!out) throw HarnessError("write failed for " + (dir / name).string());
  };
  write("metrics.csv", ToCsv(table, with_timing));
  write("plotdata.json", ToPlotData(table).dump(2) + "\n");

  nlohmann::json summary = {{"sentences", table.cells.empty() ? 0 : table.cells.back().sentence_id},
                            {"systems", nlohmann::json::array()},
                            {"reduction", nlohmann::json::array()}};
  for (size_t i = 0; i < table.systems.size(); ++i) {
    summary["systems"].push_back({{"system", SystemName(table.systems[i])},
                                  {"totals", ToJson(table.totals[i])}});
  }
  const bool has_engine = std::count(table.systems.begin(), table.systems.end(),
                                     SystemKind::kEngineRestricted) > 0;
  for (auto system : table.systems) {
    if (!has_engine || system == SystemKind::kEngineRestricted) continue;
    const ReductionFactor f = ComputeReduction(table, system, SystemKind::kEngineRestricted);
    summary["reduction"].push_back({{"numerator", SystemName(system)},
                                    {"denominator", "engine-restricted"},
                                    {"syntax_checks", f.syntax_checks},
                                    {"concept_checks", f.concept_checks}});
  }
  write("summary.json", summary.dump(2) + "\n");
}

}  // namespace parsetalk
