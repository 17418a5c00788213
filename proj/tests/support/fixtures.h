#ifndef PARSETALK_TESTS_FIXTURES_H_
#define PARSETALK_TESTS_FIXTURES_H_

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "parsetalk/engine.h"
#include "parsetalk/grammar.h"
#include "parsetalk/term_kb.h"

namespace parsetalk::testing {

inline std::filesystem::path DataPath(const std::string& name) {
  return std::filesystem::path(PARSETALK_DATA_DIR) / name;
}

// The information-technology fixture grammar bound to its knowledge base.
struct Fixture {
  KnowledgeBase kb = KnowledgeBase::LoadFile(DataPath("it_kb.json"));
  Grammar grammar = Grammar::LoadFile(DataPath("it_grammar.json"), &kb.terminology());
};

// Non-blank lines that do not start with '#'.
inline std::vector<std::string> ReadSentences(const std::string& name) {
  std::ifstream in(DataPath(name));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  return out;
}

inline ParseResult ParseSentence(Fixture& f, const std::string& sentence, ParseConfig config = {}) {
  const auto tokens = Tokenize(sentence);
  return Parse(tokens, f.grammar, f.kb, config);
}

inline ParseConfig Exhaustive() {
  ParseConfig c;
  c.mode = ParseMode::kExhaustive;
  return c;
}

}  // namespace parsetalk::testing

#endif  // PARSETALK_TESTS_FIXTURES_H_
