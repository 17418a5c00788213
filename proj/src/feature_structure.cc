#include "parsetalk/feature_structure.h"

namespace parsetalk {

std::optional<FeatureStructure> FeatureStructure::Unify(const FeatureStructure& a,
                                                        const FeatureStructure& b) {
  FeatureStructure out = a;
  for (const auto& [attr, value] : b.pairs_) {
    auto it = out.pairs_.find(attr);
    if (it == out.pairs_.end()) {
      out.pairs_.emplace(attr, value);
      continue;
    }
    if (it->second == value || value == kUnconstrained) continue;
    if (it->second == kUnconstrained) {
      it->second = value;
      continue;
    }
    return std::nullopt;
  }
  return out;
}

FeatureStructure FeatureStructure::Overridden(const FeatureStructure& other) const {
  FeatureStructure out = *this;
  for (const auto& [attr, value] : other.pairs_) out.pairs_[attr] = value;
  return out;
}

FeatureStructure FeatureStructure::ResolvedAgainst(const FeatureStructure& head) const {
  FeatureStructure out = *this;
  for (auto& [attr, value] : out.pairs_) {
    if (value != kHeadReference) continue;
    auto resolved = head.Get(attr);
    value = resolved ? *resolved : std::string(kUnconstrained);
  }
  return out;
}

std::optional<std::string> FeatureStructure::Get(std::string_view attribute) const {
  auto it = pairs_.find(std::string(attribute));
  if (it == pairs_.end()) return std::nullopt;
  return it->second;
}

std::string FeatureStructure::ToString() const {
  std::string s = "{";
  bool first = true;
  for (const auto& [attr, value] : pairs_) {
    if (!first) s += ", ";
    first = false;
    s += attr + ":" + value;
  }
  return s + "}";
}

}  // namespace parsetalk
