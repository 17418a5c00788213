#include "parsetalk/chart.h"

#include <bit>
#include <deque>
#include <iterator>
#include <map>
#include <set>
#include <unordered_set>

#include "parsetalk/engine.h"

namespace parsetalk {

namespace {

struct ChartEdge {
  PhraseActor phrase;
  uint64_t mask = 0;
  bool passive = false;
};

uint64_t MaskOf(const std::vector<int>& coverage) {
  uint64_t m = 0;
  for (int t : coverage) m |= uint64_t{1} << t;
  return m;
}

bool RootSaturated(const Grammar& grammar, const PhraseActor& p) {
  const WordActor& r = p.root();
  for (const auto& v : grammar.Frame(r.word_class)) {
    if (v.mandatory && !r.filled.count(v.label)) return false;
  }
  return true;
}

class Chart {
 public:
  Chart(std::span<const std::string> tokens, const Grammar& grammar, KnowledgeBase& kb,
        const ChartConfig& config)
      : tokens_(tokens), grammar_(grammar), kb_(kb), config_(config) {
    if (config_.timeout) deadline_ = std::chrono::steady_clock::now() + *config_.timeout;
  }

  ParseResult Run() {
    WordUid uid = 0;
    for (size_t i = 0; i < tokens_.size(); ++i) {
      const int pos = static_cast<int>(i);
      std::vector<WordActor> readings;
      for (LexemeId lex : grammar_.Lookup(tokens_[i])) {
        readings.push_back(MakeWordActor(grammar_, lex, pos, uid++));
      }
      if (readings.empty()) {
        readings.push_back(MakeUnknownWordActor(grammar_, tokens_[i], pos, uid++));
      }
      for (auto& w : readings) {
        PhraseActor p;
        p.context = kb_.root_context();
        if (w.concept_id) {
          p.context = kb_.CloneContext(kb_.root_context());
          w.instance = kb_.AssertInstance(p.context, *w.concept_id);
        }
        p.active_head = w.uid;
        p.coverage = {pos};
        p.words.push_back(std::move(w));
        Propose(std::move(p));
      }
    }
    while (!agenda_.empty()) {
      CheckDeadline();
      const size_t e = agenda_.front();
      agenda_.pop_front();
      for (size_t f : settled_) {
        if (edges_[e].mask & edges_[f].mask) continue;
        Combine(e, f);
        Combine(f, e);
      }
      settled_.push_back(e);
    }
    return Collect();
  }

 private:
  void CheckDeadline() const {
    if (config_.timeout && std::chrono::steady_clock::now() > deadline_) {
      throw ResourceExhausted("timeout after " + std::to_string(config_.timeout->count()) + " ms");
    }
  }

  bool Admissible(uint64_t head, uint64_t mod) const {
    const uint64_t joined = head | mod;
    if (config_.variant == ChartVariant::kStandard) return GapCount(joined) == 0;
    return GapCount(joined) <= config_.max_gaps;
  }

  void Combine(size_t h, size_t m) {
    if (!edges_[m].passive) return;
    if (!Admissible(edges_[h].mask, edges_[m].mask)) return;
    const PhraseActor& hp = edges_[h].phrase;
    const PhraseActor& mp = edges_[m].phrase;
    const WordActor& head = hp.root();
    const WordActor& mod = mp.root();
    for (const auto& v : grammar_.Frame(head.word_class)) {
      if (!SyntaxCheck(grammar_, head, mod, v, metrics_)) continue;
      if (v.role_id && (!head.instance || !mod.instance)) continue;
      ContextId ctx = kb_.MergeContexts(hp.context, mp.context);
      if (v.role_id) {
        auto checked = kb_.ConceptCheck(ctx, *head.instance, *v.role_id, *mod.instance, metrics_);
        if (!checked) continue;
        ctx = *checked;
      }
      PhraseActor out;
      out.words = hp.words;
      out.words.insert(out.words.end(), mp.words.begin(), mp.words.end());
      out.Find(head.uid)->filled[v.label] = mod.uid;
      out.Find(mod.uid)->head = HeadLink{head.uid, v.label};
      out.active_head = head.uid;
      out.context = ctx;
      std::set_union(hp.coverage.begin(), hp.coverage.end(), mp.coverage.begin(),
                     mp.coverage.end(), std::back_inserter(out.coverage));
      out.SortWords();
      Propose(std::move(out));
    }
  }

  void Propose(PhraseActor p) {
    if (!keys_.insert(p.Key()).second) return;
    if (edges_.size() >= config_.edge_ceiling) {
      throw ResourceExhausted("edge ceiling of " + std::to_string(config_.edge_ceiling) +
                              " exceeded");
    }
    ChartEdge e;
    e.mask = MaskOf(p.coverage);
    e.passive = RootSaturated(grammar_, p);
    e.phrase = std::move(p);
    edges_.push_back(std::move(e));
    agenda_.push_back(edges_.size() - 1);
  }

  ParseResult Collect() {
    ParseResult result;
    const int n = static_cast<int>(tokens_.size());
    const uint64_t full = n == 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1;
    std::vector<const PhraseActor*> best;
    int best_size = 0;
    for (const auto& e : edges_) {
      if (!e.passive || !e.phrase.IsWellFormed(grammar_)) continue;
      if (config_.variant == ChartVariant::kStandard && e.mask != full) continue;
      const int size = std::popcount(e.mask);
      if (size > best_size) {
        best.clear();
        best_size = size;
      }
      if (size == best_size) best.push_back(&e.phrase);
    }
    std::set<uint64_t> coverages;
    uint64_t covered = 0;
    for (const PhraseActor* p : best) {
      result.analyses.push_back(MakeAnalysis(*p, grammar_, kb_));
      coverages.insert(MaskOf(p->coverage));
      covered |= MaskOf(p->coverage);
    }
    result.complete = !best.empty() && coverages.size() == 1;
    for (int t = 0; t < n; ++t) {
      if (!(covered >> t & 1)) result.skipped.push_back(t);
    }
    metrics_.AddSkippedTokens(result.skipped.size());
    metrics_.complete = result.complete;
    result.metrics = metrics_;
    return result;
  }

  std::span<const std::string> tokens_;
  const Grammar& grammar_;
  KnowledgeBase& kb_;
  ChartConfig config_;
  MetricsRecord metrics_;
  std::deque<ChartEdge> edges_;  // stable references while Combine proposes
  std::deque<size_t> agenda_;
  std::vector<size_t> settled_;
  std::unordered_set<std::string> keys_;
  std::chrono::steady_clock::time_point deadline_;

 public:
  const MetricsRecord& metrics() const { return metrics_; }
};

}  // namespace

int GapCount(uint64_t coverage) {
  if (coverage == 0) return 0;
  const uint64_t span = coverage >> std::countr_zero(coverage);
  // Gaps are the runs of zeros between set bits.
  const uint64_t starts = span & ~(span << 1);
  return std::popcount(starts) - 1;
}

ParseResult ChartParse(std::span<const std::string> tokens, const Grammar& grammar,
                       KnowledgeBase& kb, const ChartConfig& config) {
  if (tokens.empty()) throw ParseError("cannot parse an empty token sequence");
  if (tokens.size() > 64) throw ParseError("chart parser handles at most 64 tokens");
  try {
    grammar.CheckBinding(kb.terminology());
  } catch (const GrammarError& e) {
    throw ParseError(std::string("grammar and knowledge base do not match: ") + e.what());
  }
  const auto start = std::chrono::steady_clock::now();
  Chart chart(tokens, grammar, kb, config);
  ParseResult result;
  try {
    result = chart.Run();
  } catch (const ResourceExhausted& e) {
    result = ParseResult{};
    result.failure = e.what();
    result.metrics = chart.metrics();
    for (int t = 0; t < static_cast<int>(tokens.size()); ++t) result.skipped.push_back(t);
  }
  result.metrics.wall_time = std::chrono::steady_clock::now() - start;
  result.metrics.complete = result.complete;
  return result;
}

}  // namespace parsetalk
