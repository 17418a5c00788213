#include "parsetalk/metrics.h"

namespace parsetalk {

MetricsRecord& MetricsRecord::operator=(const MetricsRecord& other) {
  if (this == &other) return *this;
  syntax_checks_.store(other.syntax_checks_.load());
  concept_checks_.store(other.concept_checks_.load());
  anaphora_concept_checks_.store(other.anaphora_concept_checks_.load());
  backtrack_events_.store(other.backtrack_events_.load());
  skipped_tokens_.store(other.skipped_tokens_.load());
  wall_time = other.wall_time;
  complete = other.complete;
  return *this;
}

void MetricsRecord::Accumulate(const MetricsRecord& other) {
  syntax_checks_.fetch_add(other.syntax_checks());
  concept_checks_.fetch_add(other.concept_checks());
  anaphora_concept_checks_.fetch_add(other.anaphora_concept_checks());
  backtrack_events_.fetch_add(other.backtrack_events());
  skipped_tokens_.fetch_add(other.skipped_tokens());
  wall_time += other.wall_time;
}

}  // namespace parsetalk
