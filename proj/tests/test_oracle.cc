// Three-way agreement on short sentences: exhaustive engine, discontinuous
// chart and the brute-force tree enumerator.

#include "brute_force.h"
#include "doctest.h"
#include "fixtures.h"
#include "parsetalk/chart.h"

using namespace parsetalk;
using namespace parsetalk::testing;

TEST_CASE("exhaustive engine, discontinuous chart and enumeration agree") {
  Fixture f;
  const auto sentences = ReadSentences("oracle_sentences.txt");
  REQUIRE(sentences.size() >= 20);
  for (const auto& s : sentences) {
    CAPTURE(s);
    const auto tokens = Tokenize(s);
    REQUIRE(tokens.size() <= 8);
    const AnalysisSet oracle = EnumerateAnalyses(tokens, f.grammar, f.kb.terminology());
    KnowledgeBase kb1 = f.kb.Fresh();
    const AnalysisSet engine = AnalysisSetOf(Parse(tokens, f.grammar, kb1, Exhaustive()));
    ChartConfig cc;
    cc.variant = ChartVariant::kDiscontinuous;
    KnowledgeBase kb2 = f.kb.Fresh();
    const AnalysisSet chart = AnalysisSetOf(ChartParse(tokens, f.grammar, kb2, cc));
    CHECK_MESSAGE(engine == oracle, "engine\n" << Describe(engine) << "oracle\n" << Describe(oracle));
    CHECK_MESSAGE(chart == oracle, "chart\n" << Describe(chart) << "oracle\n" << Describe(oracle));
  }
}

TEST_CASE("standard chart finds exactly the contiguous full-span trees") {
  Fixture f;
  for (const auto& s : ReadSentences("oracle_sentences.txt")) {
    CAPTURE(s);
    const auto tokens = Tokenize(s);
    AnalysisSet oracle = EnumerateAnalyses(tokens, f.grammar, f.kb.terminology());
    // Keep full-coverage trees whose every subtree spans a contiguous range.
    AnalysisSet projective;
    for (const EdgeSet& edges : oracle) {
      if (edges.size() + 1 != tokens.size()) continue;
      bool contiguous = true;
      for (size_t h = 0; h < tokens.size() && contiguous; ++h) {
        int lo = static_cast<int>(h), hi = static_cast<int>(h);
        size_t members = 1;
        std::vector<int> frontier{static_cast<int>(h)};
        while (!frontier.empty()) {
          const int cur = frontier.back();
          frontier.pop_back();
          for (const auto& e : edges) {
            if (e.head != cur) continue;
            lo = std::min(lo, e.modifier);
            hi = std::max(hi, e.modifier);
            ++members;
            frontier.push_back(e.modifier);
          }
        }
        contiguous = static_cast<size_t>(hi - lo + 1) == members;
      }
      if (contiguous) projective.insert(edges);
    }
    KnowledgeBase kb = f.kb.Fresh();
    const AnalysisSet chart = AnalysisSetOf(ChartParse(tokens, f.grammar, kb, ChartConfig{}));
    CHECK_MESSAGE(chart == projective,
                  "chart\n" << Describe(chart) << "projective\n" << Describe(projective));
  }
}
