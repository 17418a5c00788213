#ifndef PARSETALK_PREFERENCE_H_
#define PARSETALK_PREFERENCE_H_

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "parsetalk/actors.h"

namespace parsetalk {

enum class OfferKind { kHeadFound, kModifierFound, kPredictionFound };

// A positive reply to a search: the joined copy of both phrases, ready to be
// placed in a new container.
struct Offer {
  OfferKind kind = OfferKind::kHeadFound;
  ContainerId head_container = -1;
  ContainerId modifier_container = -1;
  WordUid head_word = -1;
  WordUid modifier_word = -1;
  int head_position = -1;
  std::string label;
  PhraseActor result;
  uint64_t generation = 0;
};

class PreferenceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PreferenceSplit {
  std::vector<Offer> preferred;
  std::vector<Offer> deferred;
};

// A predicate marks each offer as preferred (true) or deferred (false).
using PreferencePredicate = std::function<std::vector<bool>(std::span<const Offer>)>;

// Shipped predicates: "all-preferred" and "closest-attachment" (offers whose
// head has the greatest position win). More can be registered.
void RegisterPreferencePredicate(std::string name, PreferencePredicate predicate);
bool HasPreferencePredicate(std::string_view name);

PreferenceSplit SplitByPreference(std::vector<Offer> offers, std::string_view predicate);

}  // namespace parsetalk

#endif  // PARSETALK_PREFERENCE_H_
