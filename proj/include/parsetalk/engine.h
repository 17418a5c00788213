#ifndef PARSETALK_ENGINE_H_
#define PARSETALK_ENGINE_H_

#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "parsetalk/actors.h"
#include "parsetalk/grammar.h"
#include "parsetalk/parse_result.h"
#include "parsetalk/preference.h"
#include "parsetalk/scheduler.h"
#include "parsetalk/term_kb.h"

namespace parsetalk {

enum class ParseMode { kRestricted, kExhaustive };

struct ParseConfig {
  ParseMode mode = ParseMode::kRestricted;
  bool memoization_pruning = true;
  bool barrier_bounding = true;
  std::string preference = "all-preferred";
  uint64_t scheduler_seed = 0;
  bool trace = false;
  size_t ambiguity_cap = 64;
  // Exhaustive mode only: total phrase actors before the run is abandoned.
  size_t phrase_ceiling = 200000;
  // Restricted mode only: backtracking attempts per token.
  int backtrack_budget = 4;
  std::optional<std::chrono::milliseconds> timeout;

  // Exhaustive mode switches memoization pruning and barrier bounding off.
  ParseConfig Normalized() const;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown by Attach when an offer was computed against a chain that has
// changed since.
class StaleOfferError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

bool IsBarrierToken(std::string_view token);
std::vector<std::string> Tokenize(std::string_view text);

// One sentence worth of actors. Tokens are read left to right; each becomes
// the active container and the protocol cascade runs to quiescence before
// the next one is read.
class ParseSession {
 public:
  ParseSession(const Grammar& grammar, KnowledgeBase& kb, const ParseConfig& config);

  // Instantiates the container for the next token and appends it to the
  // textual chain. No protocol runs.
  ContainerId ReadToken(std::string_view surface);
  // ReadToken followed by the full protocol cascade.
  void Step(std::string_view surface);

  // Basic protocol. `recipients`, when given, restricts which target words
  // receive the message (used by reanalysis at discontinuities).
  std::vector<Offer> SearchHeadFor(ContainerId active, ContainerId target,
                                   const std::set<WordUid>* recipients = nullptr);
  std::vector<Offer> SearchModifierFor(ContainerId active, ContainerId target);
  std::vector<Offer> SearchPredictionFor(ContainerId active, ContainerId target);

  // Places the preferred offers into a new container that replaces both
  // source containers on the textual chain. Skipped containers between them
  // move to its left.
  ContainerId Attach(std::vector<Offer> offers);

  // Skipping: re-addresses the search pair to containers further left.
  std::optional<ContainerId> SkipForward(ContainerId active);
  // Backtracking into the parse history of the textual predecessor.
  std::optional<ContainerId> Backtrack(ContainerId active);
  // Prediction: gives roots with a head prediction a placeholder head (and
  // mandatory modifier predictions a placeholder modifier).
  std::optional<ContainerId> Predict(ContainerId active);

  ParseResult Finish();

  const ContainerActor& container(ContainerId id) const { return containers_.at(id); }
  size_t container_count() const { return containers_.size(); }
  // Live containers, left to right.
  const std::vector<ContainerId>& chain() const { return chain_; }
  std::optional<ContainerId> TextualPredecessor(ContainerId id) const;
  MetricsRecord& metrics() { return metrics_; }
  const std::vector<TraceEvent>& trace() const { return scheduler_.trace(); }
  const ParseConfig& config() const { return config_; }
  uint64_t generation() const { return generation_; }

 private:
  struct Selection {
    ContainerId container;
    std::vector<int> phrases;
  };
  enum class Direction { kHead, kModifier };

  void Cascade(ContainerId active);
  void ExhaustiveStep(ContainerId fresh);
  std::vector<Offer> Episode(ContainerId active, ContainerId target, bool reanalysis);
  std::vector<Offer> RunSearch(const Selection& active, const Selection& target, Direction dir,
                               const std::set<WordUid>* recipients, const char* message);
  std::vector<Offer> RunPredictionSearch(const Selection& active, const Selection& target,
                                         const char* message);
  std::optional<PhraseActor> JoinAttach(const PhraseActor& head_phrase, WordUid head,
                                        const PhraseActor& mod_phrase, WordUid modifier,
                                        const Valency& v);
  std::optional<PhraseActor> JoinFill(const PhraseActor& target_phrase, WordUid placeholder,
                                      const PhraseActor& active_phrase);
  ContainerId BuildContainer(std::vector<Offer> offers, ContainerId head_part,
                             ContainerId modifier_part);
  ContainerId NewContainer();
  ContainerId InstantiateToken(int position);
  void ReplaceInChain(const std::vector<ContainerId>& removed,
                      const std::vector<ContainerId>& added);
  void Relink();
  // Skipped containers lying inside the span of `composite`.
  std::vector<ContainerId> SkippedWithin(ContainerId composite) const;
  std::string WordName(WordUid uid) const;
  ContainerId RetrySkipped(ContainerId composite, std::vector<ContainerId> skipped);
  std::vector<ContainerId> HistoryOf(ContainerId id) const;
  std::vector<ContainerId> Predecessors(ContainerId id) const;
  Selection All(ContainerId id) const;
  // Phrases whose root is a real word; only these search for heads.
  Selection Searching(ContainerId id) const;
  void CheckDeadline() const;
  std::vector<Offer> Sorted(std::vector<Offer> offers) const;

  const Grammar& grammar_;
  KnowledgeBase& kb_;
  ParseConfig config_;
  Scheduler scheduler_;
  MetricsRecord metrics_;
  std::deque<ContainerActor> containers_;
  std::vector<ContainerId> chain_;
  std::vector<std::string> tokens_;
  std::vector<std::string> warnings_;
  WordUid next_uid_ = 0;
  uint64_t generation_ = 0;
  size_t phrase_total_ = 0;
  std::chrono::steady_clock::time_point deadline_;
  // Exhaustive mode: containers created for earlier tokens.
  std::vector<ContainerId> settled_;
};

// Parses one tokenized sentence.
ParseResult Parse(std::span<const std::string> tokens, const Grammar& grammar, KnowledgeBase& kb,
                  const ParseConfig& config);

}  // namespace parsetalk

#endif  // PARSETALK_ENGINE_H_
