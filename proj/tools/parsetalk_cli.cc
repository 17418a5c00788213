// Command-line front end: parse single sentences, benchmark systems over a
// corpus, or run text-level anaphora resolution.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "parsetalk/chart.h"
#include "parsetalk/engine.h"
#include "parsetalk/grammar.h"
#include "parsetalk/harness.h"
#include "parsetalk/json_io.h"
#include "parsetalk/term_kb.h"
#include "parsetalk/text_level.h"

namespace {

using parsetalk::SystemKind;

struct Options {
  std::string config_path;
  std::string grammar;
  std::string kb;
  std::string input;
  std::string system = "engine-restricted";
  std::string mode;
  uint64_t seed = 0;
  bool trace = false;
  std::string systems = "engine-restricted,chart-standard,chart-discontinuous";
  std::string out = "bench-out";
  bool timing = false;
  std::string preference = "all-preferred";
  size_t edge_ceiling = 100000;
  int gap_cap = 2;
  int timeout_ms = 0;
};

// Fills every option the user did not give on the command line from the JSON
// config file.
void ApplyConfig(CLI::App& app, Options& o) {
  if (o.config_path.empty()) return;
  std::ifstream in(o.config_path);
  if (!in) throw std::runtime_error("cannot open config " + o.config_path);
  const nlohmann::json cfg = nlohmann::json::parse(in);
  auto take = [&](const char* key, const char* flag, auto& field) {
    if (!cfg.contains(key)) return;
    CLI::Option* opt = nullptr;
    try {
      opt = app.get_option(flag);
    } catch (const CLI::OptionNotFound&) {
    }
    if (opt && opt->count() > 0) return;
    field = cfg.at(key).get<std::decay_t<decltype(field)>>();
  };
  take("system", "--system", o.system);
  take("mode", "--mode", o.mode);
  take("seed", "--seed", o.seed);
  take("trace", "--trace", o.trace);
  take("systems", "--systems", o.systems);
  take("out", "--out", o.out);
  take("timing", "--timing", o.timing);
  take("preference", "--preference", o.preference);
  take("edge_ceiling", "--edge-ceiling", o.edge_ceiling);
  take("gap_cap", "--gap-cap", o.gap_cap);
  take("timeout_ms", "--timeout-ms", o.timeout_ms);
}

parsetalk::HarnessConfig MakeHarnessConfig(const Options& o) {
  parsetalk::HarnessConfig h;
  h.engine.scheduler_seed = o.seed;
  h.engine.trace = o.trace;
  h.engine.preference = o.preference;
  h.chart.edge_ceiling = o.edge_ceiling;
  h.chart.max_gaps = o.gap_cap;
  if (o.timeout_ms > 0) {
    h.engine.timeout = std::chrono::milliseconds(o.timeout_ms);
    h.chart.timeout = std::chrono::milliseconds(o.timeout_ms);
  }
  return h;
}

struct Loaded {
  parsetalk::KnowledgeBase kb;
  parsetalk::Grammar grammar;
};

Loaded Load(const Options& o) {
  auto kb = parsetalk::KnowledgeBase::LoadFile(o.kb);
  auto grammar = parsetalk::Grammar::LoadFile(o.grammar, &kb.terminology());
  return Loaded{std::move(kb), std::move(grammar)};
}

int RunParse(const Options& o) {
  Loaded l = Load(o);
  SystemKind system = parsetalk::ParseSystemName(o.system);
  if (o.mode == "exhaustive") {
    system = SystemKind::kEngineExhaustive;
  } else if (o.mode == "restricted") {
    system = SystemKind::kEngineRestricted;
  } else if (!o.mode.empty()) {
    throw std::runtime_error("--mode must be restricted or exhaustive");
  }
  std::vector<std::string> sentences;
  if (std::filesystem::is_regular_file(o.input)) {
    sentences = parsetalk::LoadCorpus(o.input);
  } else {
    sentences.push_back(o.input);
  }
  const parsetalk::HarnessConfig config = MakeHarnessConfig(o);
  for (const auto& s : sentences) {
    const auto tokens = parsetalk::Tokenize(s);
    const auto result = parsetalk::RunSystem(system, tokens, l.grammar, l.kb, config);
    nlohmann::json out = parsetalk::ToJson(result, o.timing);
    out["sentence"] = s;
    out["system"] = parsetalk::SystemName(system);
    std::cout << out.dump(sentences.size() == 1 ? 2 : -1) << "\n";
  }
  return 0;
}

int RunBench(const Options& o) {
  Loaded l = Load(o);
  const auto systems = parsetalk::ParseSystemList(o.systems);
  const auto sentences = parsetalk::LoadCorpus(o.input);
  parsetalk::HarnessConfig config = MakeHarnessConfig(o);
  config.engine.trace = false;
  const auto table = parsetalk::RunCorpus(sentences, l.grammar, l.kb, systems, config);
  parsetalk::WriteReport(table, o.out, o.timing);
  for (const auto& c : table.cells) {
    if (c.failure) {
      std::cerr << "sentence " << c.sentence_id << " " << parsetalk::SystemName(c.system)
                << ": " << *c.failure << "\n";
    }
  }
  std::cout << "wrote " << table.cells.size() << " records to " << o.out << "\n";
  return 0;
}

int RunResolve(const Options& o) {
  Loaded l = Load(o);
  std::ifstream in(o.input);
  if (!in) throw std::runtime_error("cannot open " + o.input);
  std::stringstream text;
  text << in.rdbuf();
  parsetalk::ParseConfig config = MakeHarnessConfig(o).engine;
  if (o.mode == "exhaustive") config.mode = parsetalk::ParseMode::kExhaustive;
  const auto result = parsetalk::ParseText(text.str(), l.grammar, l.kb, config);
  nlohmann::json resolutions = nlohmann::json::array();
  for (const auto& r : result.resolutions) {
    resolutions.push_back(
        {{"utterance", r.utterance},
         {"token", r.token},
         {"antecedentUtterance", r.antecedent_utterance ? nlohmann::json(*r.antecedent_utterance)
                                                        : nlohmann::json(nullptr)},
         {"antecedentToken", r.antecedent_token ? nlohmann::json(*r.antecedent_token)
                                                : nlohmann::json(nullptr)}});
  }
  nlohmann::json centers = nlohmann::json::array();
  for (const auto& s : result.states) {
    nlohmann::json cf = nlohmann::json::array();
    for (const auto& r : s.cf) cf.push_back(r.instance);
    centers.push_back({{"cb", s.cb ? nlohmann::json(s.cb->instance) : nlohmann::json(nullptr)},
                       {"cf", cf}});
  }
  nlohmann::json out = {{"resolutions", resolutions},
                        {"centers", centers},
                        {"interpretation", parsetalk::ToJson(result.interpretation)},
                        {"metrics", parsetalk::ToJson(result.metrics, o.timing)}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental dependency parser with actor-style protocols"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config_path, "JSON file presetting any flag");

  auto add_common = [&](CLI::App* sub, const char* input_help) {
    sub->add_option("grammar", o.grammar, "grammar JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("kb", o.kb, "knowledge base JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("input", o.input, input_help)->required();
    sub->add_option("--seed", o.seed, "scheduler seed");
    sub->add_option("--preference", o.preference, "preference predicate");
    sub->add_option("--edge-ceiling", o.edge_ceiling, "chart edge ceiling");
    sub->add_option("--gap-cap", o.gap_cap, "gaps allowed per discontinuous chart edge");
    sub->add_option("--timeout-ms", o.timeout_ms, "per-sentence timeout");
    sub->add_flag("--timing", o.timing, "report wall-clock times");
  };

  CLI::App* parse = app.add_subcommand("parse", "parse a sentence (or every line of a file)");
  add_common(parse, "sentence text or file");
  parse->add_option("--system", o.system, "engine-restricted, engine-exhaustive, chart-standard, "
                                          "chart-discontinuous");
  parse->add_option("--mode", o.mode, "restricted or exhaustive (engine shorthand)");
  parse->add_flag("--trace", o.trace, "include the message trace");

  CLI::App* bench = app.add_subcommand("bench", "benchmark systems over a corpus");
  add_common(bench, "corpus file, one sentence per line");
  bench->add_option("--systems", o.systems, "comma-separated systems");
  bench->add_option("--out", o.out, "output directory");

  CLI::App* resolve = app.add_subcommand("resolve", "parse a text and resolve nominal anaphora");
  add_common(resolve, "text file");
  resolve->add_option("--mode", o.mode, "restricted or exhaustive");

  CLI11_PARSE(app, argc, argv);
  try {
    CLI::App* active = app.get_subcommands().front();
    ApplyConfig(*active, o);
    if (active == parse) return RunParse(o);
    if (active == bench) return RunBench(o);
    return RunResolve(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
