#include "parsetalk/preference.h"

#include <algorithm>
#include <map>
#include <mutex>

namespace parsetalk {

namespace {

std::mutex& RegistryMutex() {
  static std::mutex mu;
  return mu;
}

std::map<std::string, PreferencePredicate, std::less<>>& Registry() {
  static std::map<std::string, PreferencePredicate, std::less<>> registry = {
      {"all-preferred",
       [](std::span<const Offer> offers) { return std::vector<bool>(offers.size(), true); }},
      {"closest-attachment",
       [](std::span<const Offer> offers) {
         int best = -1;
         for (const auto& o : offers) best = std::max(best, o.head_position);
         std::vector<bool> out;
         for (const auto& o : offers) out.push_back(o.head_position == best);
         return out;
       }},
  };
  return registry;
}

}  // namespace

void RegisterPreferencePredicate(std::string name, PreferencePredicate predicate) {
  std::lock_guard lock(RegistryMutex());
  Registry()[std::move(name)] = std::move(predicate);
}

bool HasPreferencePredicate(std::string_view name) {
  std::lock_guard lock(RegistryMutex());
  return Registry().count(name) > 0;
}

PreferenceSplit SplitByPreference(std::vector<Offer> offers, std::string_view predicate) {
  PreferencePredicate fn;
  {
    std::lock_guard lock(RegistryMutex());
    auto it = Registry().find(predicate);
    if (it == Registry().end()) {
      throw PreferenceError("unknown preference predicate " + std::string(predicate));
    }
    fn = it->second;
  }
  PreferenceSplit split;
  if (offers.size() <= 1) {
    split.preferred = std::move(offers);
    return split;
  }
  const std::vector<bool> marks = fn(offers);
  for (size_t i = 0; i < offers.size(); ++i) {
    (marks.at(i) ? split.preferred : split.deferred).push_back(std::move(offers[i]));
  }
  if (split.preferred.empty()) std::swap(split.preferred, split.deferred);
  return split;
}

}  // namespace parsetalk
