#ifndef PARSETALK_FEATURE_STRUCTURE_H_
#define PARSETALK_FEATURE_STRUCTURE_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace parsetalk {

// Flat attribute/value matrix. Values are atoms; "*" marks an attribute
// as present but unconstrained.
class FeatureStructure {
 public:
  static constexpr std::string_view kUnconstrained = "*";
  // Only meaningful inside a valency constraint: the value is taken from the
  // head word's feature of the same name before unification.
  static constexpr std::string_view kHeadReference = "=";

  FeatureStructure() = default;
  FeatureStructure(std::initializer_list<std::pair<const std::string, std::string>> init)
      : pairs_(init) {}

  // Returns the unified structure, or nullopt when some shared attribute
  // holds two different atoms.
  static std::optional<FeatureStructure> Unify(const FeatureStructure& a,
                                               const FeatureStructure& b);

  // Overlays `other` on top of this structure; values in `other` win.
  FeatureStructure Overridden(const FeatureStructure& other) const;

  // Replaces every kHeadReference value with the matching value of `head`
  // (or kUnconstrained when the head lacks the attribute).
  FeatureStructure ResolvedAgainst(const FeatureStructure& head) const;

  void Set(std::string attribute, std::string value) {
    pairs_[std::move(attribute)] = std::move(value);
  }
  std::optional<std::string> Get(std::string_view attribute) const;
  bool Has(std::string_view attribute) const {
    return pairs_.find(std::string(attribute)) != pairs_.end();
  }
  bool empty() const { return pairs_.empty(); }
  size_t size() const { return pairs_.size(); }
  const std::map<std::string, std::string>& pairs() const { return pairs_; }

  std::string ToString() const;

  friend bool operator==(const FeatureStructure&, const FeatureStructure&) = default;

 private:
  std::map<std::string, std::string> pairs_;
};

}  // namespace parsetalk

#endif  // PARSETALK_FEATURE_STRUCTURE_H_
