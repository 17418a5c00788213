#include "parsetalk/grammar.h"

#include <algorithm>
#include <functional>
#include <set>

#include "json_util.h"

namespace parsetalk {

using internal::ParseDocument;
using internal::RequireKey;
using internal::RequireString;

namespace {

FeatureStructure ParseFeatures(const nlohmann::json& obj, std::string_view context) {
  FeatureStructure fs;
  if (!obj.contains("features")) return fs;
  const auto& f = obj.at("features");
  if (!f.is_object()) throw GrammarError(std::string(context) + ": 'features' must be an object");
  for (const auto& [attr, value] : f.items()) {
    if (!value.is_string()) {
      throw GrammarError(std::string(context) + ": feature '" + attr + "' must be an atom");
    }
    fs.Set(attr, value.get<std::string>());
  }
  return fs;
}

Valency ParseValency(const nlohmann::json& v, const std::string& owner) {
  const std::string ctx = "class " + owner + " valency";
  Valency out;
  out.label = RequireString<GrammarError>(v, "label", ctx);
  const std::string dir = RequireString<GrammarError>(v, "direction", ctx + " " + out.label);
  if (dir == "left") {
    out.direction = Direction::kModifierPrecedes;
  } else if (dir == "right") {
    out.direction = Direction::kModifierFollows;
  } else {
    throw GrammarError(ctx + " " + out.label + ": direction must be \"left\" or \"right\"");
  }
  out.target_name = RequireString<GrammarError>(v, "target", ctx + " " + out.label);
  const auto& mandatory = RequireKey<GrammarError>(v, "mandatory", ctx + " " + out.label);
  if (!mandatory.is_boolean()) throw GrammarError(ctx + " " + out.label + ": mandatory must be boolean");
  out.mandatory = mandatory.get<bool>();
  out.constraint = ParseFeatures(v, ctx + " " + out.label);
  if (v.contains("role")) out.role = v.at("role").get<std::string>();
  return out;
}

}  // namespace

Grammar Grammar::Parse(std::string_view json_text, const Terminology* terminology) {
  const auto doc = ParseDocument<GrammarError>(json_text, "grammar");
  if (!doc.is_object()) throw GrammarError("grammar: top level must be an object");

  Grammar g;
  std::vector<std::optional<std::string>> parent_names;
  std::vector<std::vector<std::pair<Prediction, std::string>>> raw_predictions;

  const auto& classes = RequireKey<GrammarError>(doc, "classes", "grammar");
  if (!classes.is_array()) throw GrammarError("grammar: 'classes' must be a list");
  for (const auto& c : classes) {
    WordClass wc;
    wc.name = RequireString<GrammarError>(c, "name", "grammar class");
    if (g.class_index_.count(wc.name)) throw GrammarError("grammar: duplicate class " + wc.name);
    parent_names.push_back(c.contains("parent") ? std::optional(c.at("parent").get<std::string>())
                                                : std::nullopt);
    wc.features = ParseFeatures(c, "class " + wc.name);
    if (c.contains("valencies")) {
      std::set<std::string> labels;
      for (const auto& v : c.at("valencies")) {
        Valency val = ParseValency(v, wc.name);
        if (!labels.insert(val.label).second) {
          throw GrammarError("class " + wc.name + ": duplicate valency label " + val.label);
        }
        wc.valencies.push_back(std::move(val));
      }
    }
    if (c.contains("predictions")) {
      for (const auto& p : c.at("predictions")) {
        Prediction pred;
        const std::string slot = RequireString<GrammarError>(p, "slot", "class " + wc.name + " prediction");
        if (slot == "head") {
          pred.slot = Prediction::Slot::kHead;
        } else if (slot == "modifier") {
          pred.slot = Prediction::Slot::kModifier;
        } else {
          throw GrammarError("class " + wc.name + ": prediction slot must be head or modifier");
        }
        pred.class_name = RequireString<GrammarError>(p, "class", "class " + wc.name + " prediction");
        pred.mandatory = p.value("mandatory", false);
        wc.predictions.push_back(std::move(pred));
      }
    }
    g.class_index_.emplace(wc.name, static_cast<ClassId>(g.classes_.size()));
    g.classes_.push_back(std::move(wc));
  }

  // Resolve parents and find the single root.
  std::optional<ClassId> root;
  for (size_t i = 0; i < g.classes_.size(); ++i) {
    if (!parent_names[i]) {
      if (root) {
        throw GrammarError("grammar: class tree has two roots: " + g.classes_[*root].name +
                           " and " + g.classes_[i].name);
      }
      root = static_cast<ClassId>(i);
      continue;
    }
    auto p = g.FindClass(*parent_names[i]);
    if (!p) {
      throw GrammarError("class " + g.classes_[i].name + ": undeclared parent " + *parent_names[i]);
    }
    g.classes_[i].parent = *p;
  }
  if (!root) throw GrammarError("grammar: class graph has no root (cycle)");
  g.root_ = *root;

  if (auto unknown = g.FindClass(kUnknownClass)) {
    g.unknown_ = *unknown;
  } else {
    g.unknown_ = static_cast<ClassId>(g.classes_.size());
    g.classes_.push_back(WordClass{std::string(kUnknownClass), g.root_, {}, {}, {}});
    g.class_index_.emplace(std::string(kUnknownClass), g.unknown_);
  }

  for (auto& wc : g.classes_) {
    for (auto& v : wc.valencies) {
      auto t = g.FindClass(v.target_name);
      if (!t) {
        throw GrammarError("class " + wc.name + " valency " + v.label + ": undeclared target class " +
                           v.target_name);
      }
      v.target = *t;
    }
    for (auto& p : wc.predictions) {
      auto t = g.FindClass(p.class_name);
      if (!t) throw GrammarError("class " + wc.name + ": prediction of undeclared class " + p.class_name);
      p.predicted_class = *t;
    }
  }

  const auto& lexicon = RequireKey<GrammarError>(doc, "lexicon", "grammar");
  if (!lexicon.is_array()) throw GrammarError("grammar: 'lexicon' must be a list");
  for (const auto& e : lexicon) {
    LexemeEntry entry;
    entry.surface = RequireString<GrammarError>(e, "surface", "lexicon entry");
    entry.class_name = RequireString<GrammarError>(e, "class", "lexicon entry " + entry.surface);
    auto cls = g.FindClass(entry.class_name);
    if (!cls) {
      throw GrammarError("lexicon entry " + entry.surface + ": undeclared class " + entry.class_name);
    }
    entry.word_class = *cls;
    entry.features = ParseFeatures(e, "lexicon entry " + entry.surface);
    if (e.contains("concept")) entry.concept_name = e.at("concept").get<std::string>();
    g.surface_index_.emplace(entry.surface, static_cast<LexemeId>(g.lexicon_.size()));
    g.lexicon_.push_back(std::move(entry));
  }

  g.Build();
  if (terminology) g.Bind(*terminology);
  return g;
}

Grammar Grammar::LoadFile(const std::filesystem::path& path, const Terminology* terminology) {
  return Parse(internal::ReadFile<GrammarError>(path), terminology);
}

void Grammar::Build() {
  const size_t n = classes_.size();
  const size_t words = (n + 63) / 64;
  ancestors_.assign(n, std::vector<uint64_t>(words, 0));
  depth_.assign(n, 0);
  std::vector<int> state(n, 0);
  std::function<void(ClassId)> visit = [&](ClassId c) {
    if (state[c] == 2) return;
    if (state[c] == 1) throw GrammarError("grammar: cycle in class graph through " + classes_[c].name);
    state[c] = 1;
    ancestors_[c][c / 64] |= uint64_t{1} << (c % 64);
    depth_[c] = 1;
    if (classes_[c].parent) {
      ClassId p = *classes_[c].parent;
      visit(p);
      for (size_t w = 0; w < words; ++w) ancestors_[c][w] |= ancestors_[p][w];
      depth_[c] = depth_[p] + 1;
    }
    state[c] = 2;
  };
  for (size_t c = 0; c < n; ++c) visit(static_cast<ClassId>(c));

  // Effective frames, predictions and features, parents before children.
  std::vector<ClassId> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = static_cast<ClassId>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](ClassId a, ClassId b) { return depth_[a] < depth_[b]; });
  frames_.assign(n, {});
  predictions_.assign(n, {});
  features_.assign(n, {});
  for (ClassId c : order) {
    const WordClass& wc = classes_[c];
    std::vector<Valency> frame;
    std::vector<Prediction> preds;
    FeatureStructure feats;
    if (wc.parent) {
      frame = frames_[*wc.parent];
      preds = predictions_[*wc.parent];
      feats = features_[*wc.parent];
    }
    for (const auto& v : wc.valencies) {
      auto it = std::find_if(frame.begin(), frame.end(),
                             [&](const Valency& x) { return x.label == v.label; });
      if (it != frame.end()) {
        *it = v;
      } else {
        frame.push_back(v);
      }
    }
    for (const auto& p : wc.predictions) {
      auto it = std::find_if(preds.begin(), preds.end(), [&](const Prediction& x) {
        return x.slot == p.slot && x.predicted_class == p.predicted_class;
      });
      if (it != preds.end()) {
        *it = p;
      } else {
        preds.push_back(p);
      }
    }
    frames_[c] = std::move(frame);
    predictions_[c] = std::move(preds);
    features_[c] = feats.Overridden(wc.features);
  }

  extended_frames_.assign(n, {});
  for (size_t c = 0; c < n; ++c) {
    std::vector<Valency> ext = frames_[c];
    for (ClassId sub : order) {
      if (sub == static_cast<ClassId>(c) || !ClassSubsumes(static_cast<ClassId>(c), sub)) continue;
      for (const auto& v : frames_[sub]) {
        bool seen = std::any_of(ext.begin(), ext.end(),
                                [&](const Valency& x) { return x.label == v.label; });
        if (!seen) ext.push_back(v);
      }
    }
    extended_frames_[c] = std::move(ext);
  }
}

void Grammar::Bind(const Terminology& terminology) {
  auto bind_valency = [&](Valency& v, const std::string& owner) {
    if (!v.role) return;
    auto id = terminology.FindRole(*v.role);
    if (!id) throw GrammarError("class " + owner + " valency " + v.label + ": undeclared role " + *v.role);
    v.role_id = *id;
  };
  for (auto& wc : classes_) {
    for (auto& v : wc.valencies) bind_valency(v, wc.name);
  }
  for (size_t c = 0; c < classes_.size(); ++c) {
    for (auto& v : frames_[c]) bind_valency(v, classes_[c].name);
    for (auto& v : extended_frames_[c]) bind_valency(v, classes_[c].name);
  }
  for (auto& e : lexicon_) {
    if (!e.concept_name) continue;
    auto id = terminology.FindConcept(*e.concept_name);
    if (!id) throw GrammarError("lexicon entry " + e.surface + ": undeclared concept " + *e.concept_name);
    e.concept_id = *id;
  }
  bound_ = true;
}

void Grammar::CheckBinding(const Terminology& terminology) const {
  if (!bound_) throw GrammarError("grammar is not bound to a knowledge base");
  for (const auto& wc : classes_) {
    for (const auto& v : wc.valencies) {
      if (!v.role) continue;
      auto id = terminology.FindRole(*v.role);
      if (!id || *id != v.role_id) {
        throw GrammarError("grammar/kb mismatch: role " + *v.role + " of class " + wc.name);
      }
    }
  }
  for (const auto& e : lexicon_) {
    if (!e.concept_name) continue;
    auto id = terminology.FindConcept(*e.concept_name);
    if (!id || *id != e.concept_id) {
      throw GrammarError("grammar/kb mismatch: concept " + *e.concept_name + " of lexeme " + e.surface);
    }
  }
}

std::optional<ClassId> Grammar::FindClass(std::string_view name) const {
  auto it = class_index_.find(name);
  if (it == class_index_.end()) return std::nullopt;
  return it->second;
}

ClassId Grammar::ClassIdOf(std::string_view name) const {
  auto id = FindClass(name);
  if (!id) throw GrammarError("unknown word class " + std::string(name));
  return *id;
}

const WordClass& Grammar::class_at(ClassId id) const {
  if (id < 0 || static_cast<size_t>(id) >= classes_.size()) throw GrammarError("unknown class id");
  return classes_[id];
}

bool Grammar::ClassSubsumes(ClassId general, ClassId specific) const {
  if (general < 0 || specific < 0 || static_cast<size_t>(general) >= classes_.size() ||
      static_cast<size_t>(specific) >= classes_.size()) {
    throw GrammarError("unknown class id");
  }
  return (ancestors_[specific][general / 64] >> (general % 64)) & 1;
}

bool Grammar::ClassSubsumes(std::string_view general, std::string_view specific) const {
  return ClassSubsumes(ClassIdOf(general), ClassIdOf(specific));
}

int Grammar::ClassDepth(ClassId id) const {
  class_at(id);
  return depth_[id];
}

const Valency* Grammar::FindValency(ClassId id, std::string_view label) const {
  for (const auto& v : Frame(id)) {
    if (v.label == label) return &v;
  }
  return nullptr;
}

std::vector<LexemeId> Grammar::Lookup(std::string_view surface) const {
  std::vector<LexemeId> out;
  auto [lo, hi] = surface_index_.equal_range(surface);
  for (auto it = lo; it != hi; ++it) out.push_back(it->second);
  std::sort(out.begin(), out.end());
  return out;
}

Grammar Grammar::WithoutPredictions() const {
  Grammar g = *this;
  for (auto& wc : g.classes_) wc.predictions.clear();
  for (auto& p : g.predictions_) p.clear();
  return g;
}

}  // namespace parsetalk
