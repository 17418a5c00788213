#ifndef PARSETALK_TERM_KB_H_
#define PARSETALK_TERM_KB_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "parsetalk/metrics.h"

namespace parsetalk {

using ConceptId = int;
using RoleId = int;
using ContextId = int;
using InstanceId = int;

class KbError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Concept {
  std::string name;
  std::vector<ConceptId> parents;
};

struct RoleDef {
  std::string name;
  ConceptId domain = 0;
  ConceptId range = 0;
};

// Asserted concept taxonomy plus role definitions. Immutable once built;
// subsumption is answered from a precomputed transitive closure.
class Terminology {
 public:
  static constexpr std::string_view kRootConcept = "THING";

  // Parses the JSON document {concepts: [{name, parents}], roles: [{name,
  // domain, range}]}. THING is implicit; concepts without parents hang
  // directly below it.
  static Terminology Parse(std::string_view json_text);
  static Terminology LoadFile(const std::filesystem::path& path);

  ConceptId root() const { return 0; }
  std::optional<ConceptId> FindConcept(std::string_view name) const;
  ConceptId ConceptIdOf(std::string_view name) const;
  std::optional<RoleId> FindRole(std::string_view name) const;
  RoleId RoleIdOf(std::string_view name) const;

  bool Subsumes(ConceptId general, ConceptId specific) const;
  bool Subsumes(std::string_view general, std::string_view specific) const;

  const Concept& concept_at(ConceptId id) const;
  const RoleDef& role_at(RoleId id) const;
  size_t concept_count() const { return concepts_.size(); }
  size_t role_count() const { return roles_.size(); }

  // Length of the longest parent path from `id` to the root, plus one.
  int Depth(ConceptId id) const;

 private:
  void BuildClosure();

  std::vector<Concept> concepts_;
  std::vector<RoleDef> roles_;
  std::map<std::string, ConceptId, std::less<>> concept_index_;
  std::map<std::string, RoleId, std::less<>> role_index_;
  // ancestors_[c] is a bitset over concept ids, reflexive.
  std::vector<std::vector<uint64_t>> ancestors_;
};

struct InstanceRef {
  InstanceId id = -1;
  ContextId context = 0;
  friend bool operator==(const InstanceRef&, const InstanceRef&) = default;
};

struct RoleAssertion {
  InstanceId subject = -1;
  RoleId role = -1;
  InstanceId filler = -1;
  friend auto operator<=>(const RoleAssertion&, const RoleAssertion&) = default;
};

// Everything visible from one context, ordered by instance id.
struct InterpretationGraph {
  struct Node {
    InstanceId instance;
    std::string concept_name;
    friend auto operator<=>(const Node&, const Node&) = default;
  };
  struct Triple {
    InstanceId subject;
    std::string role;
    InstanceId filler;
    friend auto operator<=>(const Triple&, const Triple&) = default;
  };
  std::vector<Node> nodes;
  std::vector<Triple> triples;

  bool empty() const { return nodes.empty() && triples.empty(); }
  friend bool operator==(const InterpretationGraph&, const InterpretationGraph&) = default;
};

// Terminology plus a tree of copy-on-write interpretation contexts. A clone
// reads through to its parent; a context that has been cloned is frozen.
class KnowledgeBase {
 public:
  explicit KnowledgeBase(std::shared_ptr<const Terminology> terminology);

  static KnowledgeBase Parse(std::string_view json_text);
  static KnowledgeBase LoadFile(const std::filesystem::path& path);

  // A new knowledge base sharing this terminology, with only an empty root
  // context.
  KnowledgeBase Fresh() const { return KnowledgeBase(terminology_); }

  const Terminology& terminology() const { return *terminology_; }
  std::shared_ptr<const Terminology> shared_terminology() const { return terminology_; }

  ContextId root_context() const { return 0; }
  ContextId CloneContext(ContextId ctx);
  InstanceRef AssertInstance(ContextId ctx, ConceptId concept_id);

  // CONCEPTCHECK. Always counts one call. On success returns a fresh child of
  // `ctx` holding the role assertion; `ctx` itself is never modified.
  std::optional<ContextId> ConceptCheck(ContextId ctx, InstanceRef head, RoleId role,
                                        InstanceRef filler, MetricsRecord& metrics);

  // Child of `base` that additionally holds whatever is visible from `other`
  // but not from `base`.
  ContextId MergeContexts(ContextId base, ContextId other);

  // New context equal to the view from `ctx` with instance `from` replaced by
  // `to` in every assertion and `from` itself removed. A no-op rewrite when
  // `from` is already gone.
  ContextId SubstituteInstance(ContextId ctx, InstanceId from, InstanceId to);

  std::optional<ConceptId> ConceptOf(ContextId ctx, InstanceId instance) const;
  InterpretationGraph ExtractInterpretation(ContextId ctx) const;

  std::optional<ContextId> ParentOf(ContextId ctx) const;
  size_t OwnAssertionCount(ContextId ctx) const;
  size_t OwnInstanceCount(ContextId ctx) const;
  size_t context_count() const;

 private:
  struct Context {
    std::optional<ContextId> parent;
    std::vector<std::pair<InstanceId, ConceptId>> instances;
    std::vector<RoleAssertion> assertions;
    int children = 0;
  };
  struct Workspace {
    mutable std::mutex mu;
    std::vector<Context> contexts;
    InstanceId next_instance = 0;
  };
  struct View {
    std::map<InstanceId, ConceptId> instances;
    std::vector<RoleAssertion> assertions;
  };

  const Context& ContextLocked(ContextId ctx) const;
  ContextId CloneLocked(ContextId ctx);
  View ViewLocked(ContextId ctx) const;
  std::optional<ConceptId> ConceptOfLocked(ContextId ctx, InstanceId instance) const;

  std::shared_ptr<const Terminology> terminology_;
  std::unique_ptr<Workspace> workspace_;
};

}  // namespace parsetalk

#endif  // PARSETALK_TERM_KB_H_
