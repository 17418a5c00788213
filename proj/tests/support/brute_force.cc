#include "brute_force.h"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace parsetalk::testing {

namespace {

struct Reading {
  ClassId word_class;
  FeatureStructure features;
  std::optional<ConceptId> concept_id;
};

std::vector<std::vector<Reading>> ReadingsOf(std::span<const std::string> tokens,
                                             const Grammar& grammar) {
  std::vector<std::vector<Reading>> out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    std::vector<Reading> rs;
    for (LexemeId lex : grammar.Lookup(tokens[i])) {
      const WordActor w = MakeWordActor(grammar, lex, static_cast<int>(i), 0);
      rs.push_back({w.word_class, w.features, grammar.lexeme_at(lex).concept_id});
    }
    if (rs.empty()) {
      const WordActor w = MakeUnknownWordActor(grammar, tokens[i], static_cast<int>(i), 0);
      rs.push_back({w.word_class, w.features, std::nullopt});
    }
    out.push_back(std::move(rs));
  }
  return out;
}

// Local licence of one arc, written out from the constraint definitions.
bool Licensed(const Grammar& grammar, const Terminology& terminology, const Reading& head,
              int head_pos, const Reading& mod, int mod_pos, const Valency& v) {
  if (!grammar.ClassSubsumes(v.target, mod.word_class)) return false;
  FeatureStructure constraint;
  for (const auto& [attr, value] : v.constraint.pairs()) {
    if (value == "=") {
      constraint.Set(attr, head.features.Get(attr).value_or("*"));
    } else {
      constraint.Set(attr, value);
    }
  }
  for (const auto& [attr, value] : constraint.pairs()) {
    const auto mine = mod.features.Get(attr);
    if (!mine || *mine == "*" || value == "*") continue;
    if (*mine != value) return false;
  }
  if (v.direction == Direction::kModifierPrecedes ? mod_pos > head_pos : mod_pos < head_pos) {
    return false;
  }
  if (v.role_id) {
    if (!head.concept_id || !mod.concept_id) return false;
    const RoleDef& role = terminology.role_at(*v.role_id);
    if (!terminology.Subsumes(role.domain, *head.concept_id)) return false;
    if (!terminology.Subsumes(role.range, *mod.concept_id)) return false;
  }
  return true;
}

struct Arc {
  int head;
  std::string label;
};

class Enumerator {
 public:
  Enumerator(std::span<const std::string> tokens, const Grammar& grammar,
             const Terminology& terminology)
      : grammar_(grammar), terminology_(terminology), readings_(ReadingsOf(tokens, grammar)) {}

  AnalysisSet Run() {
    const int n = static_cast<int>(readings_.size());
    for (int size = n; size >= 1; --size) {
      AnalysisSet found;
      for (uint32_t mask = 1; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != size) continue;
        members_.clear();
        for (int t = 0; t < n; ++t) {
          if (mask >> t & 1) members_.push_back(t);
        }
        choice_.assign(n, 0);
        ChooseReadings(0, found);
      }
      if (!found.empty()) return found;
    }
    return {};
  }

 private:
  void ChooseReadings(size_t k, AnalysisSet& found) {
    if (k == members_.size()) {
      EnumerateTrees(found);
      return;
    }
    const int t = members_[k];
    for (size_t r = 0; r < readings_[t].size(); ++r) {
      choice_[t] = r;
      ChooseReadings(k + 1, found);
    }
  }

  const Reading& At(int t) const { return readings_[t][choice_[t]]; }

  void EnumerateTrees(AnalysisSet& found) {
    options_.clear();
    for (int m : members_) {
      std::vector<std::optional<Arc>> opts{std::nullopt};  // nullopt: root
      for (int h : members_) {
        if (h == m) continue;
        for (const Valency& v : grammar_.Frame(At(h).word_class)) {
          if (Licensed(grammar_, terminology_, At(h), h, At(m), m, v)) {
            opts.push_back(Arc{h, v.label});
          }
        }
      }
      options_[m] = std::move(opts);
    }
    assigned_.clear();
    Assign(0, false, found);
  }

  void Assign(size_t k, bool have_root, AnalysisSet& found) {
    if (k == members_.size()) {
      if (have_root && Acyclic() && Saturated()) found.insert(Edges());
      return;
    }
    const int m = members_[k];
    for (const auto& opt : options_[m]) {
      if (!opt) {
        if (have_root) continue;
        assigned_[m] = std::nullopt;
        Assign(k + 1, true, found);
        continue;
      }
      bool taken = false;
      for (const auto& [other, arc] : assigned_) {
        if (arc && arc->head == opt->head && arc->label == opt->label) taken = true;
      }
      if (taken) continue;
      assigned_[m] = opt;
      Assign(k + 1, have_root, found);
    }
    assigned_.erase(m);
  }

  bool Acyclic() const {
    for (int m : members_) {
      int cur = m;
      for (size_t steps = 0; steps <= members_.size(); ++steps) {
        const auto& arc = assigned_.at(cur);
        if (!arc) break;
        cur = arc->head;
        if (steps == members_.size()) return false;
      }
    }
    return true;
  }

  bool Saturated() const {
    for (int h : members_) {
      for (const Valency& v : grammar_.Frame(At(h).word_class)) {
        if (!v.mandatory) continue;
        bool filled = false;
        for (const auto& [m, arc] : assigned_) {
          if (arc && arc->head == h && arc->label == v.label) filled = true;
        }
        if (!filled) return false;
      }
    }
    return true;
  }

  EdgeSet Edges() const {
    EdgeSet out;
    for (const auto& [m, arc] : assigned_) {
      if (arc) out.push_back({arc->head, m, arc->label});
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  const Grammar& grammar_;
  const Terminology& terminology_;
  std::vector<std::vector<Reading>> readings_;
  std::vector<int> members_;
  std::vector<size_t> choice_;
  std::map<int, std::vector<std::optional<Arc>>> options_;
  std::map<int, std::optional<Arc>> assigned_;
};

}  // namespace

AnalysisSet EnumerateAnalyses(std::span<const std::string> tokens, const Grammar& grammar,
                              const Terminology& terminology) {
  return Enumerator(tokens, grammar, terminology).Run();
}

AnalysisSet AnalysisSetOf(const ParseResult& result) {
  AnalysisSet out;
  for (const Analysis& a : result.analyses) {
    EdgeSet edges = a.edges;
    std::sort(edges.begin(), edges.end());
    out.insert(std::move(edges));
  }
  return out;
}

std::string Describe(const AnalysisSet& set) {
  std::ostringstream os;
  for (const EdgeSet& edges : set) {
    os << "{";
    for (const auto& e : edges) os << " " << e.head << "-" << e.label << "->" << e.modifier;
    os << " }\n";
  }
  return os.str();
}

}  // namespace parsetalk::testing
