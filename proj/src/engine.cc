#include "parsetalk/engine.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <deque>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

namespace parsetalk {

namespace {

std::vector<int> UnionOf(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool Overlaps(const std::vector<int>& a, const std::vector<int>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

const Valency* FindIn(const std::vector<Valency>& frame, const std::string& label) {
  for (const auto& v : frame) {
    if (v.label == label) return &v;
  }
  return nullptr;
}

std::string PhraseName(ContainerId c, int index) {
  return ContainerName(c) + ".P" + std::to_string(index);
}

}  // namespace

ParseConfig ParseConfig::Normalized() const {
  ParseConfig out = *this;
  if (out.mode == ParseMode::kExhaustive) {
    out.memoization_pruning = false;
    out.barrier_bounding = false;
  }
  if (out.ambiguity_cap == 0) out.ambiguity_cap = 1;
  return out;
}

bool IsBarrierToken(std::string_view token) {
  static const std::set<std::string_view> kBarriers = {".", ",", ";", ":", "!", "?"};
  return kBarriers.count(token) > 0;
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::move(cur));
    cur.clear();
  };
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
      continue;
    }
    if (IsBarrierToken(std::string_view(&c, 1))) {
      // Keep separators inside numbers ("$2,000", "3.5") attached.
      const bool inner = !cur.empty() && i + 1 < text.size() &&
                         std::isdigit(static_cast<unsigned char>(text[i + 1])) &&
                         std::isdigit(static_cast<unsigned char>(cur.back()));
      if (!inner) {
        flush();
        tokens.emplace_back(1, c);
        continue;
      }
    }
    cur.push_back(c);
  }
  flush();
  return tokens;
}

ParseSession::ParseSession(const Grammar& grammar, KnowledgeBase& kb, const ParseConfig& config)
    : grammar_(grammar), kb_(kb), config_(config.Normalized()), scheduler_(config.scheduler_seed) {
  try {
    grammar_.CheckBinding(kb_.terminology());
  } catch (const GrammarError& e) {
    throw ParseError(std::string("grammar and knowledge base do not match: ") + e.what());
  }
  if (!HasPreferencePredicate(config_.preference)) {
    throw PreferenceError("unknown preference predicate " + config_.preference);
  }
  scheduler_.set_tracing(config_.trace);
  if (config_.timeout) deadline_ = std::chrono::steady_clock::now() + *config_.timeout;
}

void ParseSession::CheckDeadline() const {
  if (config_.timeout && std::chrono::steady_clock::now() > deadline_) {
    throw ResourceExhausted("timeout after " + std::to_string(config_.timeout->count()) + " ms");
  }
}

std::string ParseSession::WordName(WordUid uid) const { return "W" + std::to_string(uid); }

ContainerId ParseSession::NewContainer() {
  ContainerActor c;
  c.id = static_cast<ContainerId>(containers_.size());
  containers_.push_back(std::move(c));
  return containers_.back().id;
}

ContainerId ParseSession::InstantiateToken(int position) {
  const std::string& surface = tokens_.at(position);
  const ContainerId id = NewContainer();
  ContainerActor& c = containers_[id];
  c.is_barrier = IsBarrierToken(surface);
  c.coverage = {position};
  std::vector<WordActor> readings;
  for (LexemeId lex : grammar_.Lookup(surface)) {
    readings.push_back(MakeWordActor(grammar_, lex, position, next_uid_++));
  }
  if (readings.empty()) {
    readings.push_back(MakeUnknownWordActor(grammar_, surface, position, next_uid_++));
  }
  for (auto& w : readings) {
    PhraseActor p;
    p.context = kb_.root_context();
    if (w.concept_id) {
      p.context = kb_.CloneContext(kb_.root_context());
      w.instance = kb_.AssertInstance(p.context, *w.concept_id);
    }
    p.active_head = w.uid;
    p.coverage = {position};
    p.words.push_back(std::move(w));
    c.phrases.push_back(std::move(p));
  }
  return id;
}

void ParseSession::Relink() {
  std::stable_sort(chain_.begin(), chain_.end(), [&](ContainerId a, ContainerId b) {
    return containers_[a].rightmost() < containers_[b].rightmost();
  });
  for (size_t i = 0; i < chain_.size(); ++i) {
    containers_[chain_[i]].textual_predecessor =
        i == 0 ? std::nullopt : std::optional<ContainerId>(chain_[i - 1]);
  }
  ++generation_;
}

void ParseSession::ReplaceInChain(const std::vector<ContainerId>& removed,
                                  const std::vector<ContainerId>& added) {
  std::erase_if(chain_, [&](ContainerId id) {
    return std::find(removed.begin(), removed.end(), id) != removed.end();
  });
  chain_.insert(chain_.end(), added.begin(), added.end());
  Relink();
}

ContainerId ParseSession::ReadToken(std::string_view surface) {
  tokens_.emplace_back(surface);
  const ContainerId id = InstantiateToken(static_cast<int>(tokens_.size()) - 1);
  chain_.push_back(id);
  Relink();
  return id;
}

void ParseSession::Step(std::string_view surface) {
  const ContainerId id = ReadToken(surface);
  CheckDeadline();
  if (config_.mode == ParseMode::kExhaustive) {
    ExhaustiveStep(id);
  } else {
    Cascade(id);
  }
}

std::optional<ContainerId> ParseSession::TextualPredecessor(ContainerId id) const {
  return containers_.at(id).textual_predecessor;
}

std::vector<ContainerId> ParseSession::Predecessors(ContainerId id) const {
  auto it = std::find(chain_.begin(), chain_.end(), id);
  std::vector<ContainerId> out;
  if (it == chain_.end()) return out;
  while (it != chain_.begin()) {
    --it;
    out.push_back(*it);
  }
  return out;
}

ParseSession::Selection ParseSession::Searching(ContainerId id) const {
  Selection s{id, {}};
  const auto& phrases = containers_.at(id).phrases;
  for (size_t i = 0; i < phrases.size(); ++i) {
    if (!phrases[i].root().placeholder) s.phrases.push_back(static_cast<int>(i));
  }
  return s;
}

ParseSession::Selection ParseSession::All(ContainerId id) const {
  Selection s{id, {}};
  for (size_t i = 0; i < containers_.at(id).phrases.size(); ++i) {
    s.phrases.push_back(static_cast<int>(i));
  }
  return s;
}

std::vector<ContainerId> ParseSession::HistoryOf(ContainerId id) const {
  std::vector<ContainerId> out;
  std::set<ContainerId> seen = {id};
  std::deque<ContainerId> queue = {id};
  while (!queue.empty()) {
    const ContainerActor& c = containers_[queue.front()];
    queue.pop_front();
    for (auto next : {c.historical_predecessor, c.historical_modifier}) {
      if (next && seen.insert(*next).second) {
        out.push_back(*next);
        queue.push_back(*next);
      }
    }
  }
  return out;
}

std::optional<PhraseActor> ParseSession::JoinAttach(const PhraseActor& head_phrase, WordUid head,
                                                    const PhraseActor& mod_phrase,
                                                    WordUid modifier, const Valency& v) {
  const WordActor& h = *head_phrase.Find(head);
  const WordActor& m = *mod_phrase.Find(modifier);
  const bool conceptual = v.role_id.has_value() && !h.placeholder && !m.placeholder;
  if (conceptual && (!h.instance || !m.instance)) return std::nullopt;
  ContextId ctx = kb_.MergeContexts(head_phrase.context, mod_phrase.context);
  if (conceptual) {
    auto checked = kb_.ConceptCheck(ctx, *h.instance, *v.role_id, *m.instance, metrics_);
    if (!checked) return std::nullopt;
    ctx = *checked;
  }
  PhraseActor out;
  out.words = head_phrase.words;
  out.words.insert(out.words.end(), mod_phrase.words.begin(), mod_phrase.words.end());
  out.Find(head)->filled[v.label] = modifier;
  out.Find(modifier)->head = HeadLink{head, v.label};
  out.active_head = head_phrase.active_head;
  out.context = ctx;
  out.coverage = UnionOf(head_phrase.coverage, mod_phrase.coverage);
  out.deferred = head_phrase.deferred || mod_phrase.deferred;
  out.SortWords();
  return out;
}

std::optional<PhraseActor> ParseSession::JoinFill(const PhraseActor& target_phrase,
                                                  WordUid placeholder,
                                                  const PhraseActor& active_phrase) {
  const WordActor ph = *target_phrase.Find(placeholder);
  const WordActor& filler = active_phrase.root();
  if (filler.placeholder) return std::nullopt;
  auto features = FeatureStructure::Unify(ph.features, filler.features);
  if (!features) return std::nullopt;

  PhraseActor out;
  for (const auto& w : target_phrase.words) {
    if (w.uid != placeholder) out.words.push_back(w);
  }
  out.words.insert(out.words.end(), active_phrase.words.begin(), active_phrase.words.end());
  ContextId ctx = kb_.MergeContexts(target_phrase.context, active_phrase.context);
  WordActor* w = out.Find(filler.uid);
  w->features = *features;

  // Modifiers the placeholder had collected are re-validated against the
  // actual word.
  for (const auto& [label, mod_uid] : ph.filled) {
    WordActor* m = out.Find(mod_uid);
    const Valency* v = FindIn(FrameOf(grammar_, *w), label);
    if (!v) return std::nullopt;
    m->head.reset();
    if (!SyntaxCheck(grammar_, *w, *m, *v, metrics_)) return std::nullopt;
    if (v->role_id && !m->placeholder) {
      if (!w->instance || !m->instance) return std::nullopt;
      auto checked = kb_.ConceptCheck(ctx, *w->instance, *v->role_id, *m->instance, metrics_);
      if (!checked) return std::nullopt;
      ctx = *checked;
    }
    w->filled[label] = mod_uid;
    m->head = HeadLink{w->uid, label};
  }
  if (ph.head) {
    WordActor* h = out.Find(ph.head->head);
    const std::string label = ph.head->label;
    const Valency* v = FindIn(FrameOf(grammar_, *h), label);
    if (!v) return std::nullopt;
    h->filled.erase(label);
    if (!SyntaxCheck(grammar_, *h, *w, *v, metrics_)) return std::nullopt;
    if (v->role_id && !h->placeholder) {
      if (!h->instance || !w->instance) return std::nullopt;
      auto checked = kb_.ConceptCheck(ctx, *h->instance, *v->role_id, *w->instance, metrics_);
      if (!checked) return std::nullopt;
      ctx = *checked;
    }
    h->filled[label] = w->uid;
    w->head = HeadLink{h->uid, label};
    out.active_head = target_phrase.active_head;
  } else {
    out.active_head = filler.uid;
  }
  out.context = ctx;
  out.coverage = UnionOf(target_phrase.coverage, active_phrase.coverage);
  out.deferred = target_phrase.deferred || active_phrase.deferred;
  out.SortWords();
  return out;
}

std::vector<Offer> ParseSession::RunSearch(const Selection& active, const Selection& target,
                                           Direction dir, const std::set<WordUid>* recipients,
                                           const char* message) {
  std::vector<Offer> offers;
  const uint64_t gen = generation_;
  const bool everywhere = config_.mode == ParseMode::kExhaustive;
  const std::string active_name = ContainerName(active.container);
  scheduler_.Send(message, active_name, ContainerName(target.container), [&, this]() {
    for (int pi : target.phrases) {
      scheduler_.Send(message, ContainerName(target.container), PhraseName(target.container, pi),
                      [&, this, pi]() {
        const PhraseActor& tp = containers_[target.container].phrases[pi];
        std::vector<WordUid> addressees;
        if (dir == Direction::kHead) {
          if (everywhere) {
            for (const auto& w : tp.words) addressees.push_back(w.uid);
          } else {
            addressees = tp.RightRim();
          }
        } else {
          addressees.push_back(tp.active_head);
        }
        if (recipients) {
          std::erase_if(addressees, [&](WordUid u) { return !recipients->count(u); });
        }
        for (WordUid uid : addressees) {
          scheduler_.Send(message, PhraseName(target.container, pi), WordName(uid),
                          [&, this, pi, uid]() {
            size_t found = 0;
            for (int aj : active.phrases) {
              const PhraseActor& tp2 = containers_[target.container].phrases[pi];
              const PhraseActor& ap = containers_[active.container].phrases[aj];
              const WordActor& tw = *tp2.Find(uid);
              if (dir == Direction::kHead) {
                const WordActor& mod = ap.root();
                for (const auto& v : FrameOf(grammar_, tw)) {
                  if (!SyntaxCheck(grammar_, tw, mod, v, metrics_)) continue;
                  if (auto joined = JoinAttach(tp2, uid, ap, mod.uid, v)) {
                    offers.push_back(Offer{OfferKind::kHeadFound, target.container,
                                           active.container, uid, mod.uid, tw.position, v.label,
                                           std::move(*joined), gen});
                    ++found;
                  }
                }
              } else {
                std::vector<const WordActor*> heads;
                if (everywhere) {
                  for (const auto& w : ap.words) heads.push_back(&w);
                } else {
                  heads.push_back(&ap.root());
                }
                for (const WordActor* h : heads) {
                  for (const auto& v : FrameOf(grammar_, *h)) {
                    if (!SyntaxCheck(grammar_, *h, tw, v, metrics_)) continue;
                    if (auto joined = JoinAttach(ap, h->uid, tp2, uid, v)) {
                      offers.push_back(Offer{OfferKind::kModifierFound, active.container,
                                             target.container, h->uid, uid, h->position,
                                             v.label, std::move(*joined), gen});
                      ++found;
                    }
                  }
                }
              }
            }
            const char* reply = found ? (dir == Direction::kHead ? "headFound" : "modifierFound")
                                      : "searchFailed";
            scheduler_.Send(reply, WordName(uid), active_name,
                            [found] { return std::to_string(found) + " offers"; });
            return found ? std::string("accepted") : std::string("rejected");
          });
        }
        return "forwarded to " + std::to_string(addressees.size()) + " words";
      });
    }
    return "forwarded to " + std::to_string(target.phrases.size()) + " phrases";
  });
  scheduler_.RunUntilQuiescent();
  return Sorted(std::move(offers));
}

std::vector<Offer> ParseSession::RunPredictionSearch(const Selection& active,
                                                     const Selection& target,
                                                     const char* message) {
  std::vector<Offer> offers;
  const uint64_t gen = generation_;
  const std::string active_name = ContainerName(active.container);
  scheduler_.Send(message, active_name, ContainerName(target.container), [&, this]() {
    size_t forwarded = 0;
    for (int pi : target.phrases) {
      const PhraseActor& tp = containers_[target.container].phrases[pi];
      for (const auto& w : tp.words) {
        if (!w.placeholder) continue;
        ++forwarded;
        const WordUid ph = w.uid;
        scheduler_.Send(message, PhraseName(target.container, pi), WordName(ph),
                        [&, this, pi, ph]() {
          size_t found = 0;
          for (int aj : active.phrases) {
            const PhraseActor& tp2 = containers_[target.container].phrases[pi];
            const PhraseActor& ap = containers_[active.container].phrases[aj];
            const WordActor& slot = *tp2.Find(ph);
            const WordActor& filler = ap.root();
            if (filler.placeholder || !grammar_.ClassSubsumes(slot.word_class, filler.word_class)) {
              continue;
            }
            if (auto joined = JoinFill(tp2, ph, ap)) {
              offers.push_back(Offer{OfferKind::kPredictionFound, target.container,
                                     active.container, ph, filler.uid, filler.position, "",
                                     std::move(*joined), gen});
              ++found;
            }
          }
          scheduler_.Send(found ? "predictionFound" : "searchFailed", WordName(ph), active_name,
                          [found] { return std::to_string(found) + " offers"; });
          return found ? std::string("accepted") : std::string("rejected");
        });
      }
    }
    return "forwarded to " + std::to_string(forwarded) + " placeholders";
  });
  scheduler_.RunUntilQuiescent();
  return Sorted(std::move(offers));
}

std::vector<Offer> ParseSession::Sorted(std::vector<Offer> offers) const {
  std::vector<std::pair<std::string, Offer>> keyed;
  keyed.reserve(offers.size());
  for (auto& o : offers) {
    std::string key = o.result.Key() + "#" + std::to_string(static_cast<int>(o.kind)) + o.label;
    keyed.emplace_back(std::move(key), std::move(o));
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Offer> out;
  for (auto& [k, o] : keyed) out.push_back(std::move(o));
  return out;
}

std::vector<Offer> ParseSession::SearchHeadFor(ContainerId active, ContainerId target,
                                               const std::set<WordUid>* recipients) {
  return RunSearch(All(active), All(target), Direction::kHead, recipients, "searchHeadFor");
}

std::vector<Offer> ParseSession::SearchModifierFor(ContainerId active, ContainerId target) {
  return RunSearch(All(active), All(target), Direction::kModifier, nullptr, "searchModifierFor");
}

std::vector<Offer> ParseSession::SearchPredictionFor(ContainerId active, ContainerId target) {
  return RunPredictionSearch(All(active), All(target), "searchPredictionFor");
}

std::vector<Offer> ParseSession::Episode(ContainerId active, ContainerId target,
                                         bool reanalysis) {
  const bool has_placeholder = std::any_of(
      containers_[target].phrases.begin(), containers_[target].phrases.end(),
      [](const PhraseActor& p) { return p.HasPlaceholder(); });
  const Selection searching = Searching(active);
  if (searching.phrases.empty()) return {};
  if (has_placeholder) {
    auto offers = RunPredictionSearch(searching, All(target),
                                      reanalysis ? "reSearchPredictionFor" : "searchPredictionFor");
    if (!offers.empty()) return offers;
  }
  auto offers = RunSearch(searching, All(target), Direction::kHead, nullptr,
                          reanalysis ? "reSearchHeadFor" : "searchHeadFor");
  if (!offers.empty()) return offers;
  return RunSearch(searching, All(target), Direction::kModifier, nullptr,
                   reanalysis ? "reSearchModifierFor" : "searchModifierFor");
}

ContainerId ParseSession::BuildContainer(std::vector<Offer> offers, ContainerId head_part,
                                         ContainerId modifier_part) {
  PreferenceSplit split = SplitByPreference(std::move(offers), config_.preference);
  auto fill = [&](ContainerId id, std::vector<Offer>& source, bool deferred) {
    ContainerActor& c = containers_[id];
    std::set<std::string> keys;
    for (auto& o : source) {
      if (!keys.insert(o.result.Key()).second) continue;
      if (c.phrases.size() >= config_.ambiguity_cap) {
        warnings_.push_back("ambiguity cap of " + std::to_string(config_.ambiguity_cap) +
                            " reached in " + ContainerName(id) + "; further analyses dropped");
        break;
      }
      o.result.deferred = o.result.deferred || deferred;
      c.phrases.push_back(std::move(o.result));
    }
    c.coverage.clear();
    for (const auto& p : c.phrases) c.coverage = UnionOf(c.coverage, p.coverage);
  };
  const ContainerId id = NewContainer();
  fill(id, split.preferred, false);
  containers_[id].historical_predecessor = head_part;
  if (!config_.memoization_pruning) containers_[id].historical_modifier = modifier_part;
  if (!split.deferred.empty()) {
    const ContainerId d = NewContainer();
    fill(d, split.deferred, true);
    containers_[d].historical_predecessor = head_part;
    if (!config_.memoization_pruning) containers_[d].historical_modifier = modifier_part;
    containers_[id].deferred = d;
  }
  phrase_total_ += containers_[id].phrases.size();
  return id;
}

ContainerId ParseSession::Attach(std::vector<Offer> offers) {
  if (offers.empty()) throw std::invalid_argument("Attach needs at least one offer");
  for (const auto& o : offers) {
    if (o.generation != generation_) {
      throw StaleOfferError("offer computed against chain generation " +
                            std::to_string(o.generation) + ", chain is now at " +
                            std::to_string(generation_));
    }
  }
  const ContainerId head_part = offers.front().head_container;
  const ContainerId mod_part = offers.front().modifier_container;
  auto pos_of = [&](ContainerId id) {
    auto it = std::find(chain_.begin(), chain_.end(), id);
    if (it == chain_.end()) {
      throw StaleOfferError(ContainerName(id) + " is no longer on the textual chain");
    }
    return it - chain_.begin();
  };
  auto a = pos_of(head_part);
  auto b = pos_of(mod_part);
  if (a > b) std::swap(a, b);
  std::vector<ContainerId> between(chain_.begin() + a + 1, chain_.begin() + b);
  for (ContainerId s : between) containers_[s].skipped = true;
  const ContainerId n = BuildContainer(std::move(offers), head_part, mod_part);
  ReplaceInChain({head_part, mod_part}, {n});
  return RetrySkipped(n, SkippedWithin(n));
}

std::vector<ContainerId> ParseSession::SkippedWithin(ContainerId composite) const {
  const auto& cov = containers_[composite].coverage;
  std::vector<ContainerId> out;
  if (cov.empty()) return out;
  for (ContainerId id : chain_) {
    const ContainerActor& c = containers_[id];
    if (!c.skipped || c.is_barrier || c.coverage.empty()) continue;
    if (c.coverage.front() > cov.front() && c.coverage.back() < cov.back()) out.push_back(id);
  }
  return out;
}

ContainerId ParseSession::RetrySkipped(ContainerId composite, std::vector<ContainerId> skipped) {
  std::sort(skipped.begin(), skipped.end(), [&](ContainerId x, ContainerId y) {
    return containers_[x].rightmost() > containers_[y].rightmost();
  });
  for (ContainerId s : skipped) {
    if (std::find(chain_.begin(), chain_.end(), s) == chain_.end()) continue;
    if (containers_[s].is_barrier) continue;
    std::set<WordUid> at_gap;
    for (const auto& p : containers_[composite].phrases) {
      for (int t : containers_[s].coverage) {
        for (WordUid u : p.DiscontinuityWords(t)) at_gap.insert(u);
      }
    }
    auto offers =
        RunSearch(Searching(s), All(composite), Direction::kHead, &at_gap, "reSearchHeadFor");
    if (offers.empty()) {
      offers =
          RunSearch(Searching(s), All(composite), Direction::kModifier, &at_gap, "reSearchModifierFor");
    }
    if (offers.empty()) continue;
    const ContainerId head_part = offers.front().head_container;
    const ContainerId mod_part = offers.front().modifier_container;
    const ContainerId n = BuildContainer(std::move(offers), head_part, mod_part);
    ReplaceInChain({composite, s}, {n});
    composite = n;
  }
  return composite;
}

std::optional<ContainerId> ParseSession::SkipForward(ContainerId active) {
  const auto preds = Predecessors(active);
  for (size_t k = 1; k < preds.size(); ++k) {
    if (config_.barrier_bounding && containers_[preds[k - 1]].is_barrier) break;
    CheckDeadline();
    auto offers = Episode(active, preds[k], false);
    if (!offers.empty()) return Attach(std::move(offers));
  }
  return std::nullopt;
}

std::optional<ContainerId> ParseSession::Backtrack(ContainerId active) {
  const auto preds = Predecessors(active);
  if (preds.empty()) return std::nullopt;
  metrics_.CountBacktrack();
  for (size_t k = 0; k < preds.size(); ++k) {
    if (k > 0 && config_.barrier_bounding && containers_[preds[k - 1]].is_barrier) break;
    const ContainerId p = preds[k];
    if (containers_[p].is_barrier) continue;
    std::vector<ContainerId> candidates;
    if (containers_[p].deferred) candidates.push_back(*containers_[p].deferred);
    for (ContainerId h : HistoryOf(p)) {
      if (std::find(candidates.begin(), candidates.end(), h) == candidates.end()) {
        candidates.push_back(h);
      }
    }
    for (ContainerId h : candidates) {
      CheckDeadline();
      auto offers = Episode(active, h, true);
      if (offers.empty()) continue;
      const ContainerId head_part = offers.front().head_container;
      const ContainerId mod_part = offers.front().modifier_container;
      const ContainerId n = BuildContainer(std::move(offers), head_part, mod_part);
      // Tokens the discarded analysis had absorbed come back as fresh,
      // skipped singletons so they can be retried against the new reading.
      std::vector<ContainerId> fresh;
      const auto& covered = containers_[h].coverage;
      for (int t : containers_[p].coverage) {
        if (std::binary_search(covered.begin(), covered.end(), t)) continue;
        if (std::binary_search(containers_[n].coverage.begin(), containers_[n].coverage.end(), t)) {
          continue;
        }
        const ContainerId f = InstantiateToken(t);
        containers_[f].skipped = true;
        fresh.push_back(f);
      }
      for (size_t j = 0; j < k; ++j) containers_[preds[j]].skipped = true;
      std::vector<ContainerId> added = {n};
      added.insert(added.end(), fresh.begin(), fresh.end());
      ReplaceInChain({active, p}, added);
      return RetrySkipped(n, SkippedWithin(n));
    }
  }
  return std::nullopt;
}

std::optional<ContainerId> ParseSession::Predict(ContainerId active) {
  const ContainerActor& a = containers_[active];
  std::vector<PhraseActor> phrases;
  bool changed = false;
  for (const auto& p : a.phrases) {
    PhraseActor q = p;
    const WordActor r = p.root();
    if (r.placeholder) {
      phrases.push_back(std::move(q));
      continue;
    }
    for (const auto& pr : grammar_.Predictions(r.word_class)) {
      if (pr.slot == Prediction::Slot::kHead) {
        if (q.active_head != r.uid) continue;
        for (const auto& v : grammar_.ExtendedFrame(pr.predicted_class)) {
          const int key = v.direction == parsetalk::Direction::kModifierPrecedes
                              ? WordActor::kFutureOrderKey + next_uid_
                              : r.order_key - 1;
          WordActor ph = MakePlaceholder(grammar_, pr.predicted_class, r.position, key, next_uid_);
          if (!SyntaxCheck(grammar_, ph, r, v, metrics_)) continue;
          ++next_uid_;
          ph.filled[v.label] = r.uid;
          q.Find(r.uid)->head = HeadLink{ph.uid, v.label};
          q.active_head = ph.uid;
          q.words.push_back(std::move(ph));
          changed = true;
          break;
        }
      } else if (pr.mandatory) {
        for (const auto& v : grammar_.Frame(r.word_class)) {
          if (!v.mandatory || q.Find(r.uid)->filled.count(v.label)) continue;
          if (!grammar_.ClassSubsumes(v.target, pr.predicted_class)) continue;
          const int key = v.direction == parsetalk::Direction::kModifierPrecedes
                              ? r.order_key - 1
                              : WordActor::kFutureOrderKey + next_uid_;
          WordActor ph = MakePlaceholder(grammar_, pr.predicted_class, r.position, key, next_uid_);
          if (!SyntaxCheck(grammar_, *q.Find(r.uid), ph, v, metrics_)) continue;
          ++next_uid_;
          q.Find(r.uid)->filled[v.label] = ph.uid;
          ph.head = HeadLink{r.uid, v.label};
          q.words.push_back(std::move(ph));
          changed = true;
          break;
        }
      }
    }
    q.SortWords();
    phrases.push_back(std::move(q));
  }
  if (!changed) return std::nullopt;
  const ContainerId n = NewContainer();
  containers_[n].phrases = std::move(phrases);
  containers_[n].coverage = containers_[active].coverage;
  containers_[n].historical_predecessor = active;
  scheduler_.Send("predict", ContainerName(active), ContainerName(n),
                  [] { return std::string("placeholders created"); }, 0);
  scheduler_.RunUntilQuiescent();
  ReplaceInChain({active}, {n});
  return n;
}

void ParseSession::Cascade(ContainerId active) {
  bool progressed = false;
  bool predicted = false;
  int backtracks = 0;
  while (true) {
    CheckDeadline();
    if (containers_[active].is_barrier) return;
    // A phrase headed by a placeholder waits for the word that fills it.
    if (Searching(active).phrases.empty()) return;
    const auto preds = Predecessors(active);
    if (preds.empty()) {
      if (!progressed && !predicted) {
        if (auto p = Predict(active)) {
          active = *p;
          predicted = true;
          continue;
        }
      }
      return;
    }
    auto offers = Episode(active, preds.front(), false);
    if (!offers.empty()) {
      active = Attach(std::move(offers));
      progressed = true;
      continue;
    }
    if (auto n = SkipForward(active)) {
      active = *n;
      progressed = true;
      continue;
    }
    if (progressed || predicted) return;
    if (auto p = Predict(active)) {
      active = *p;
      predicted = true;
      continue;
    }
    if (backtracks >= config_.backtrack_budget) return;
    ++backtracks;
    if (auto n = Backtrack(active)) {
      active = *n;
      progressed = true;
      continue;
    }
    return;
  }
}

void ParseSession::ExhaustiveStep(ContainerId fresh) {
  if (containers_[fresh].is_barrier) return;
  std::map<std::vector<int>, ContainerId> by_coverage = {{containers_[fresh].coverage, fresh}};
  std::map<ContainerId, std::set<std::string>> keys;
  for (const auto& p : containers_[fresh].phrases) keys[fresh].insert(p.Key());
  std::deque<Selection> work = {All(fresh)};
  phrase_total_ += containers_[fresh].phrases.size();
  while (!work.empty()) {
    const Selection sel = std::move(work.front());
    work.pop_front();
    CheckDeadline();
    for (ContainerId q : settled_) {
      if (Overlaps(containers_[sel.container].coverage, containers_[q].coverage)) continue;
      auto offers = RunSearch(sel, All(q), Direction::kHead, nullptr, "searchHeadFor");
      auto more = RunSearch(sel, All(q), Direction::kModifier, nullptr, "searchModifierFor");
      std::move(more.begin(), more.end(), std::back_inserter(offers));
      if (offers.empty()) continue;
      PreferenceSplit split = SplitByPreference(std::move(offers), config_.preference);
      for (auto& o : split.deferred) o.result.deferred = true;
      std::move(split.deferred.begin(), split.deferred.end(), std::back_inserter(split.preferred));

      const auto coverage = UnionOf(containers_[sel.container].coverage, containers_[q].coverage);
      auto [it, inserted] = by_coverage.try_emplace(coverage, -1);
      if (inserted) {
        it->second = NewContainer();
        containers_[it->second].coverage = coverage;
        containers_[it->second].historical_predecessor = sel.container;
        containers_[it->second].historical_modifier = q;
      }
      const ContainerId x = it->second;
      Selection added{x, {}};
      for (auto& o : split.preferred) {
        if (!keys[x].insert(o.result.Key()).second) continue;
        if (containers_[x].phrases.size() >= config_.ambiguity_cap) {
          warnings_.push_back("ambiguity cap of " + std::to_string(config_.ambiguity_cap) +
                              " reached in " + ContainerName(x) + "; further analyses dropped");
          break;
        }
        added.phrases.push_back(static_cast<int>(containers_[x].phrases.size()));
        containers_[x].phrases.push_back(std::move(o.result));
      }
      if (added.phrases.empty()) continue;
      phrase_total_ += added.phrases.size();
      if (phrase_total_ > config_.phrase_ceiling) {
        throw ResourceExhausted("phrase ceiling of " + std::to_string(config_.phrase_ceiling) +
                                " exceeded");
      }
      work.push_back(std::move(added));
    }
  }
  for (const auto& [cov, id] : by_coverage) {
    settled_.push_back(id);
    if (id != fresh) chain_.push_back(id);
  }
  Relink();
}

ParseResult ParseSession::Finish() {
  ParseResult result;
  const int n = static_cast<int>(tokens_.size());
  std::set<int> covered;
  if (config_.mode == ParseMode::kExhaustive) {
    std::map<std::string, const PhraseActor*> best;
    size_t best_size = 0;
    for (ContainerId id : settled_) {
      for (const auto& p : containers_[id].phrases) {
        if (!p.IsWellFormed(grammar_)) continue;
        if (p.coverage.size() > best_size) {
          best.clear();
          best_size = p.coverage.size();
        }
        if (p.coverage.size() == best_size) best.emplace(p.Key(), &p);
      }
    }
    std::set<std::vector<int>> coverages;
    for (const auto& [key, p] : best) {
      result.analyses.push_back(MakeAnalysis(*p, grammar_, kb_));
      coverages.insert(p->coverage);
      covered.insert(p->coverage.begin(), p->coverage.end());
    }
    result.complete = !best.empty() && coverages.size() == 1;
  } else {
    std::vector<ContainerId> live;
    for (ContainerId id : chain_) {
      if (!containers_[id].skipped && !containers_[id].is_barrier) live.push_back(id);
    }
    if (live.size() == 1) {
      for (const auto& p : containers_[live.front()].phrases) {
        if (p.IsWellFormed(grammar_)) result.analyses.push_back(MakeAnalysis(p, grammar_, kb_));
      }
      result.complete = !result.analyses.empty();
    }
    if (!result.complete) {
      result.analyses.clear();
      for (ContainerId id : live) {
        for (const auto& p : containers_[id].phrases) {
          result.analyses.push_back(MakeAnalysis(p, grammar_, kb_));
        }
      }
    }
    for (ContainerId id : live) {
      for (int t : containers_[id].coverage) covered.insert(t);
    }
  }
  for (int t = 0; t < n; ++t) {
    if (!covered.count(t)) result.skipped.push_back(t);
  }
  metrics_.AddSkippedTokens(result.skipped.size());
  metrics_.complete = result.complete;
  result.metrics = metrics_;
  result.warnings = warnings_;
  result.trace = scheduler_.trace();
  return result;
}

Analysis MakeAnalysis(const PhraseActor& phrase, const Grammar& grammar, const KnowledgeBase& kb) {
  Analysis a;
  a.edges = phrase.Edges();
  a.interpretation = kb.ExtractInterpretation(phrase.context);
  a.coverage = phrase.coverage;
  a.context = phrase.context;
  a.deferred = phrase.deferred;
  a.well_formed = phrase.IsWellFormed(grammar);
  const WordActor& root = phrase.root();
  a.root = root.placeholder ? -1 : root.position;
  for (const auto& w : phrase.words) {
    AnalysisWord aw;
    aw.position = w.placeholder ? -1 : w.position;
    aw.surface = w.surface;
    aw.word_class = grammar.class_at(w.word_class).name;
    aw.features = w.features;
    if (w.instance) aw.instance = w.instance->id;
    aw.concept_id = w.concept_id;
    if (w.head) {
      const WordActor* h = phrase.Find(w.head->head);
      if (h && !h->placeholder) aw.head = h->position;
      aw.label = w.head->label;
    }
    aw.placeholder = w.placeholder;
    a.words.push_back(std::move(aw));
  }
  return a;
}

ParseResult Parse(std::span<const std::string> tokens, const Grammar& grammar, KnowledgeBase& kb,
                  const ParseConfig& config) {
  if (tokens.empty()) throw ParseError("cannot parse an empty token sequence");
  const auto start = std::chrono::steady_clock::now();
  ParseSession session(grammar, kb, config);
  ParseResult result;
  try {
    for (const auto& t : tokens) session.Step(t);
    result = session.Finish();
  } catch (const ResourceExhausted& e) {
    result = ParseResult{};
    result.failure = e.what();
    result.metrics = session.metrics();
    result.trace = session.trace();
    for (int t = 0; t < static_cast<int>(tokens.size()); ++t) result.skipped.push_back(t);
  }
  result.metrics.wall_time = std::chrono::steady_clock::now() - start;
  result.metrics.complete = result.complete;
  return result;
}

}  // namespace parsetalk
