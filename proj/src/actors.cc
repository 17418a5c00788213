#include "parsetalk/actors.h"

#include <algorithm>
#include <sstream>

namespace parsetalk {

WordActor MakeWordActor(const Grammar& grammar, LexemeId lexeme, int position, WordUid uid) {
  const LexemeEntry& entry = grammar.lexeme_at(lexeme);
  WordActor w;
  w.uid = uid;
  w.lexeme = lexeme;
  w.surface = entry.surface;
  w.position = position;
  w.order_key = WordActor::OrderKeyFor(position);
  w.word_class = entry.word_class;
  w.features = grammar.Features(entry.word_class).Overridden(entry.features);
  w.concept_id = entry.concept_id;
  return w;
}

WordActor MakeUnknownWordActor(const Grammar& grammar, std::string surface, int position,
                               WordUid uid) {
  WordActor w;
  w.uid = uid;
  w.surface = std::move(surface);
  w.position = position;
  w.order_key = WordActor::OrderKeyFor(position);
  w.word_class = grammar.unknown_class();
  w.features = grammar.Features(w.word_class);
  return w;
}

WordActor MakePlaceholder(const Grammar& grammar, ClassId predicted, int position, int order_key,
                          WordUid uid) {
  WordActor w;
  w.uid = uid;
  w.surface = "<" + grammar.class_at(predicted).name + ">";
  w.position = position;
  w.order_key = order_key;
  w.word_class = predicted;
  w.features = grammar.Features(predicted);
  w.placeholder = true;
  return w;
}

const std::vector<Valency>& FrameOf(const Grammar& grammar, const WordActor& word) {
  return word.placeholder ? grammar.ExtendedFrame(word.word_class) : grammar.Frame(word.word_class);
}

bool SyntaxCheck(const Grammar& grammar, const WordActor& head, const WordActor& modifier,
                 const Valency& v, MetricsRecord& metrics) {
  metrics.CountSyntaxCheck();
  if (head.filled.count(v.label)) return false;
  if (!grammar.ClassSubsumes(v.target, modifier.word_class) &&
      !(modifier.placeholder && grammar.ClassSubsumes(modifier.word_class, v.target))) {
    return false;
  }
  if (!FeatureStructure::Unify(modifier.features, v.constraint.ResolvedAgainst(head.features))) {
    return false;
  }
  if (v.direction == Direction::kModifierPrecedes) return modifier.order_key < head.order_key;
  return modifier.order_key > head.order_key;
}

const WordActor* PhraseActor::Find(WordUid uid) const {
  for (const auto& w : words) {
    if (w.uid == uid) return &w;
  }
  return nullptr;
}

WordActor* PhraseActor::Find(WordUid uid) {
  for (auto& w : words) {
    if (w.uid == uid) return &w;
  }
  return nullptr;
}

std::vector<WordUid> PhraseActor::RightRim() const {
  std::vector<WordUid> rim;
  const WordActor* cur = Find(active_head);
  while (cur) {
    rim.push_back(cur->uid);
    const WordActor* next = nullptr;
    for (const auto& [label, mod] : cur->filled) {
      const WordActor* m = Find(mod);
      if (!m || m->order_key < cur->order_key) continue;
      if (!next || m->order_key > next->order_key) next = m;
    }
    cur = next;
  }
  return rim;
}

std::vector<DependencyEdge> PhraseActor::Edges() const {
  std::vector<DependencyEdge> edges;
  for (const auto& w : words) {
    if (!w.head) continue;
    const WordActor* h = Find(w.head->head);
    edges.push_back(DependencyEdge{h && !h->placeholder ? h->position : -1,
                                   w.placeholder ? -1 : w.position, w.head->label});
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

bool PhraseActor::HasPlaceholder() const {
  return std::any_of(words.begin(), words.end(), [](const WordActor& w) { return w.placeholder; });
}

bool PhraseActor::IsWellFormed(const Grammar& grammar) const {
  for (const auto& w : words) {
    if (w.placeholder) return false;
    for (const auto& v : grammar.Frame(w.word_class)) {
      if (v.mandatory && !w.filled.count(v.label)) return false;
    }
  }
  return true;
}

std::vector<WordUid> PhraseActor::DiscontinuityWords(int token) const {
  const WordActor* left = nullptr;
  const WordActor* right = nullptr;
  for (const auto& w : words) {
    if (w.placeholder) continue;
    if (w.position < token && (!left || w.position > left->position)) left = &w;
    if (w.position > token && (!right || w.position < right->position)) right = &w;
  }
  std::vector<WordUid> out;
  for (const WordActor* w : {left, right}) {
    for (const WordActor* cur = w; cur; cur = cur->head ? Find(cur->head->head) : nullptr) {
      if (std::find(out.begin(), out.end(), cur->uid) == out.end()) out.push_back(cur->uid);
    }
  }
  return out;
}

std::string PhraseActor::Key() const {
  std::ostringstream key;
  for (int c : coverage) key << c << ',';
  key << '|';
  for (const auto& w : words) {
    key << w.order_key << ':' << w.lexeme << ':' << w.word_class << ':';
    if (w.head) {
      const WordActor* h = Find(w.head->head);
      key << (h ? h->order_key : -9) << ':' << w.head->label;
    } else {
      key << "root";
    }
    key << ';';
  }
  return key.str();
}

void PhraseActor::SortWords() {
  std::sort(words.begin(), words.end(),
            [](const WordActor& a, const WordActor& b) { return a.order_key < b.order_key; });
}

std::string ContainerName(ContainerId id) { return "C" + std::to_string(id); }

}  // namespace parsetalk
