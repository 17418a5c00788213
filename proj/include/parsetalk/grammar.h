#ifndef PARSETALK_GRAMMAR_H_
#define PARSETALK_GRAMMAR_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "parsetalk/feature_structure.h"
#include "parsetalk/term_kb.h"

namespace parsetalk {

using ClassId = int;
using LexemeId = int;

class GrammarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Direction { kModifierPrecedes, kModifierFollows };

struct Valency {
  std::string label;
  Direction direction = Direction::kModifierFollows;
  std::string target_name;
  ClassId target = 0;
  bool mandatory = false;
  FeatureStructure constraint;
  std::optional<std::string> role;
  // Set when the grammar is bound to a terminology.
  std::optional<RoleId> role_id;
};

struct Prediction {
  enum class Slot { kHead, kModifier };
  Slot slot = Slot::kHead;
  std::string class_name;
  ClassId predicted_class = 0;
  bool mandatory = false;
};

struct WordClass {
  std::string name;
  std::optional<ClassId> parent;
  FeatureStructure features;
  std::vector<Valency> valencies;
  std::vector<Prediction> predictions;
};

struct LexemeEntry {
  std::string surface;
  std::string class_name;
  ClassId word_class = 0;
  FeatureStructure features;
  std::optional<std::string> concept_name;
  std::optional<ConceptId> concept_id;
};

// Word-class tree with inheritance plus a full-form lexicon. Immutable once
// loaded, so one instance can be shared by any number of parses.
class Grammar {
 public:
  static constexpr std::string_view kUnknownClass = "UnknownWord";

  // Parses the JSON grammar document. When `terminology` is given, role and
  // concept names are validated and bound to its ids.
  static Grammar Parse(std::string_view json_text, const Terminology* terminology = nullptr);
  static Grammar LoadFile(const std::filesystem::path& path,
                          const Terminology* terminology = nullptr);

  ClassId root_class() const { return root_; }
  ClassId unknown_class() const { return unknown_; }
  std::optional<ClassId> FindClass(std::string_view name) const;
  ClassId ClassIdOf(std::string_view name) const;
  const WordClass& class_at(ClassId id) const;
  size_t class_count() const { return classes_.size(); }

  // True iff `specific` equals `general` or lies below it.
  bool ClassSubsumes(ClassId general, ClassId specific) const;
  bool ClassSubsumes(std::string_view general, std::string_view specific) const;
  // Root has depth 1.
  int ClassDepth(ClassId id) const;

  // Inherited plus local valencies; a local valency replaces an inherited one
  // with the same label.
  const std::vector<Valency>& Frame(ClassId id) const { return frames_.at(id); }
  // Frame of the class united with the frames of all its subclasses (first
  // occurrence of a label wins). Used for predicted placeholder words.
  const std::vector<Valency>& ExtendedFrame(ClassId id) const { return extended_frames_.at(id); }
  const Valency* FindValency(ClassId id, std::string_view label) const;
  const std::vector<Prediction>& Predictions(ClassId id) const { return predictions_.at(id); }
  const FeatureStructure& Features(ClassId id) const { return features_.at(id); }

  std::vector<LexemeId> Lookup(std::string_view surface) const;
  const LexemeEntry& lexeme_at(LexemeId id) const { return lexicon_.at(id); }
  size_t lexicon_size() const { return lexicon_.size(); }

  // Copy of this grammar with every prediction removed.
  Grammar WithoutPredictions() const;

  // Throws GrammarError unless every role and concept name resolves in
  // `terminology` to the id this grammar was bound to.
  void CheckBinding(const Terminology& terminology) const;
  bool bound() const { return bound_; }

 private:
  void Build();
  void Bind(const Terminology& terminology);

  std::vector<WordClass> classes_;
  std::map<std::string, ClassId, std::less<>> class_index_;
  std::vector<LexemeEntry> lexicon_;
  std::multimap<std::string, LexemeId, std::less<>> surface_index_;
  ClassId root_ = 0;
  ClassId unknown_ = 0;
  bool bound_ = false;

  std::vector<std::vector<uint64_t>> ancestors_;
  std::vector<int> depth_;
  std::vector<std::vector<Valency>> frames_;
  std::vector<std::vector<Valency>> extended_frames_;
  std::vector<std::vector<Prediction>> predictions_;
  std::vector<FeatureStructure> features_;
};

}  // namespace parsetalk

#endif  // PARSETALK_GRAMMAR_H_
