#ifndef PARSETALK_METRICS_H_
#define PARSETALK_METRICS_H_

#include <atomic>
#include <chrono>
#include <cstdint>

namespace parsetalk {

// Per-run counters. Increments are atomic so one record can be shared by
// concurrently running checks; copying takes a snapshot.
class MetricsRecord {
 public:
  MetricsRecord() = default;
  MetricsRecord(const MetricsRecord& other) { *this = other; }
  MetricsRecord& operator=(const MetricsRecord& other);

  void CountSyntaxCheck() { syntax_checks_.fetch_add(1, std::memory_order_relaxed); }
  void CountConceptCheck() { concept_checks_.fetch_add(1, std::memory_order_relaxed); }
  // Anaphora checks are CONCEPTCHECKs too; the sub-counter keeps them
  // separately reportable.
  void CountAnaphoraConceptCheck() {
    concept_checks_.fetch_add(1, std::memory_order_relaxed);
    anaphora_concept_checks_.fetch_add(1, std::memory_order_relaxed);
  }
  void CountBacktrack() { backtrack_events_.fetch_add(1, std::memory_order_relaxed); }
  void AddSkippedTokens(uint64_t n) { skipped_tokens_.fetch_add(n, std::memory_order_relaxed); }

  // Adds all counters of `other` into this record.
  void Accumulate(const MetricsRecord& other);

  uint64_t syntax_checks() const { return syntax_checks_.load(); }
  uint64_t concept_checks() const { return concept_checks_.load(); }
  uint64_t anaphora_concept_checks() const { return anaphora_concept_checks_.load(); }
  uint64_t backtrack_events() const { return backtrack_events_.load(); }
  uint64_t skipped_tokens() const { return skipped_tokens_.load(); }

  std::chrono::nanoseconds wall_time{0};
  bool complete = false;

 private:
  std::atomic<uint64_t> syntax_checks_{0};
  std::atomic<uint64_t> concept_checks_{0};
  std::atomic<uint64_t> anaphora_concept_checks_{0};
  std::atomic<uint64_t> backtrack_events_{0};
  std::atomic<uint64_t> skipped_tokens_{0};
};

}  // namespace parsetalk

#endif  // PARSETALK_METRICS_H_
