#include "parsetalk/term_kb.h"

#include <algorithm>
#include <functional>
#include <set>

#include "json_util.h"

namespace parsetalk {

using internal::ParseDocument;
using internal::RequireKey;
using internal::RequireString;

Terminology Terminology::Parse(std::string_view json_text) {
  const auto doc = ParseDocument<KbError>(json_text, "kb");
  if (!doc.is_object()) throw KbError("kb: top level must be an object");

  Terminology t;
  t.concepts_.push_back(Concept{std::string(kRootConcept), {}});
  t.concept_index_.emplace(std::string(kRootConcept), 0);

  std::vector<std::vector<std::string>> parent_names;
  parent_names.emplace_back();
  const auto& concepts = RequireKey<KbError>(doc, "concepts", "kb");
  if (!concepts.is_array()) throw KbError("kb: 'concepts' must be a list");
  for (const auto& c : concepts) {
    std::string name = RequireString<KbError>(c, "name", "kb concept");
    std::vector<std::string> parents;
    if (c.contains("parents")) {
      for (const auto& p : c.at("parents")) parents.push_back(p.get<std::string>());
    }
    if (name == kRootConcept) {
      if (!parents.empty()) throw KbError("kb: THING cannot have parents");
      continue;
    }
    if (t.concept_index_.count(name)) throw KbError("kb: duplicate concept " + name);
    if (parents.empty()) parents.emplace_back(kRootConcept);
    t.concept_index_.emplace(name, static_cast<ConceptId>(t.concepts_.size()));
    t.concepts_.push_back(Concept{name, {}});
    parent_names.push_back(std::move(parents));
  }
  for (size_t i = 1; i < t.concepts_.size(); ++i) {
    for (const auto& p : parent_names[i]) {
      auto id = t.FindConcept(p);
      if (!id) {
        throw KbError("kb: concept " + t.concepts_[i].name + " has undeclared parent " + p);
      }
      t.concepts_[i].parents.push_back(*id);
    }
  }

  if (doc.contains("roles")) {
    for (const auto& r : doc.at("roles")) {
      RoleDef def;
      def.name = RequireString<KbError>(r, "name", "kb role");
      const std::string domain = RequireString<KbError>(r, "domain", "kb role " + def.name);
      const std::string range = RequireString<KbError>(r, "range", "kb role " + def.name);
      auto d = t.FindConcept(domain);
      auto g = t.FindConcept(range);
      if (!d) throw KbError("kb: role " + def.name + " has undeclared domain " + domain);
      if (!g) throw KbError("kb: role " + def.name + " has undeclared range " + range);
      if (t.role_index_.count(def.name)) throw KbError("kb: duplicate role " + def.name);
      def.domain = *d;
      def.range = *g;
      t.role_index_.emplace(def.name, static_cast<RoleId>(t.roles_.size()));
      t.roles_.push_back(std::move(def));
    }
  }
  t.BuildClosure();
  return t;
}

Terminology Terminology::LoadFile(const std::filesystem::path& path) {
  return Parse(internal::ReadFile<KbError>(path));
}

void Terminology::BuildClosure() {
  const size_t n = concepts_.size();
  const size_t words = (n + 63) / 64;
  ancestors_.assign(n, std::vector<uint64_t>(words, 0));
  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<int> state(n, 0);
  std::function<void(ConceptId)> visit = [&](ConceptId c) {
    if (state[c] == 2) return;
    if (state[c] == 1) throw KbError("kb: cycle in taxonomy through " + concepts_[c].name);
    state[c] = 1;
    ancestors_[c][c / 64] |= uint64_t{1} << (c % 64);
    for (ConceptId p : concepts_[c].parents) {
      visit(p);
      for (size_t w = 0; w < words; ++w) ancestors_[c][w] |= ancestors_[p][w];
    }
    state[c] = 2;
  };
  for (size_t c = 0; c < n; ++c) visit(static_cast<ConceptId>(c));
}

std::optional<ConceptId> Terminology::FindConcept(std::string_view name) const {
  auto it = concept_index_.find(name);
  if (it == concept_index_.end()) return std::nullopt;
  return it->second;
}

ConceptId Terminology::ConceptIdOf(std::string_view name) const {
  auto id = FindConcept(name);
  if (!id) throw KbError("unknown concept " + std::string(name));
  return *id;
}

std::optional<RoleId> Terminology::FindRole(std::string_view name) const {
  auto it = role_index_.find(name);
  if (it == role_index_.end()) return std::nullopt;
  return it->second;
}

RoleId Terminology::RoleIdOf(std::string_view name) const {
  auto id = FindRole(name);
  if (!id) throw KbError("unknown role " + std::string(name));
  return *id;
}

bool Terminology::Subsumes(ConceptId general, ConceptId specific) const {
  if (general < 0 || specific < 0 || static_cast<size_t>(general) >= concepts_.size() ||
      static_cast<size_t>(specific) >= concepts_.size()) {
    throw KbError("unknown concept id");
  }
  return (ancestors_[specific][general / 64] >> (general % 64)) & 1;
}

bool Terminology::Subsumes(std::string_view general, std::string_view specific) const {
  return Subsumes(ConceptIdOf(general), ConceptIdOf(specific));
}

const Concept& Terminology::concept_at(ConceptId id) const {
  if (id < 0 || static_cast<size_t>(id) >= concepts_.size()) throw KbError("unknown concept id");
  return concepts_[id];
}

const RoleDef& Terminology::role_at(RoleId id) const {
  if (id < 0 || static_cast<size_t>(id) >= roles_.size()) throw KbError("unknown role id");
  return roles_[id];
}

int Terminology::Depth(ConceptId id) const {
  const Concept& c = concept_at(id);
  int best = 0;
  for (ConceptId p : c.parents) best = std::max(best, Depth(p));
  return best + 1;
}

// --- KnowledgeBase ---------------------------------------------------------

KnowledgeBase::KnowledgeBase(std::shared_ptr<const Terminology> terminology)
    : terminology_(std::move(terminology)), workspace_(std::make_unique<Workspace>()) {
  workspace_->contexts.emplace_back();
}

KnowledgeBase KnowledgeBase::Parse(std::string_view json_text) {
  return KnowledgeBase(std::make_shared<const Terminology>(Terminology::Parse(json_text)));
}

KnowledgeBase KnowledgeBase::LoadFile(const std::filesystem::path& path) {
  return KnowledgeBase(std::make_shared<const Terminology>(Terminology::LoadFile(path)));
}

const KnowledgeBase::Context& KnowledgeBase::ContextLocked(ContextId ctx) const {
  if (ctx < 0 || static_cast<size_t>(ctx) >= workspace_->contexts.size()) {
    throw KbError("unknown context " + std::to_string(ctx));
  }
  return workspace_->contexts[ctx];
}

ContextId KnowledgeBase::CloneLocked(ContextId ctx) {
  ContextLocked(ctx);
  auto& contexts = workspace_->contexts;
  contexts[ctx].children++;
  Context child;
  child.parent = ctx;
  contexts.push_back(std::move(child));
  return static_cast<ContextId>(contexts.size() - 1);
}

ContextId KnowledgeBase::CloneContext(ContextId ctx) {
  std::lock_guard lock(workspace_->mu);
  return CloneLocked(ctx);
}

InstanceRef KnowledgeBase::AssertInstance(ContextId ctx, ConceptId concept_id) {
  terminology_->concept_at(concept_id);
  std::lock_guard lock(workspace_->mu);
  ContextLocked(ctx);
  Context& c = workspace_->contexts[ctx];
  if (c.children > 0) {
    throw KbError("context " + std::to_string(ctx) + " has been cloned and is frozen");
  }
  InstanceId id = workspace_->next_instance++;
  c.instances.emplace_back(id, concept_id);
  return InstanceRef{id, ctx};
}

std::optional<ConceptId> KnowledgeBase::ConceptOfLocked(ContextId ctx, InstanceId instance) const {
  std::optional<ContextId> cur = ctx;
  while (cur) {
    const Context& c = ContextLocked(*cur);
    for (const auto& [id, concept_id] : c.instances) {
      if (id == instance) return concept_id;
    }
    cur = c.parent;
  }
  return std::nullopt;
}

std::optional<ConceptId> KnowledgeBase::ConceptOf(ContextId ctx, InstanceId instance) const {
  std::lock_guard lock(workspace_->mu);
  return ConceptOfLocked(ctx, instance);
}

std::optional<ContextId> KnowledgeBase::ConceptCheck(ContextId ctx, InstanceRef head, RoleId role,
                                                     InstanceRef filler, MetricsRecord& metrics) {
  metrics.CountConceptCheck();
  const RoleDef& def = terminology_->role_at(role);
  std::lock_guard lock(workspace_->mu);
  auto head_concept = ConceptOfLocked(ctx, head.id);
  auto filler_concept = ConceptOfLocked(ctx, filler.id);
  if (!head_concept || !filler_concept) {
    throw KbError("dangling instance in context " + std::to_string(ctx));
  }
  if (!terminology_->Subsumes(def.domain, *head_concept) ||
      !terminology_->Subsumes(def.range, *filler_concept)) {
    return std::nullopt;
  }
  ContextId child = CloneLocked(ctx);
  workspace_->contexts[child].assertions.push_back(RoleAssertion{head.id, role, filler.id});
  return child;
}

KnowledgeBase::View KnowledgeBase::ViewLocked(ContextId ctx) const {
  View view;
  std::vector<ContextId> chain;
  std::optional<ContextId> cur = ctx;
  while (cur) {
    chain.push_back(*cur);
    cur = ContextLocked(*cur).parent;
  }
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const Context& c = workspace_->contexts[*it];
    for (const auto& [id, concept_id] : c.instances) view.instances[id] = concept_id;
    view.assertions.insert(view.assertions.end(), c.assertions.begin(), c.assertions.end());
  }
  return view;
}

ContextId KnowledgeBase::MergeContexts(ContextId base, ContextId other) {
  std::lock_guard lock(workspace_->mu);
  View base_view = ViewLocked(base);
  View other_view = ViewLocked(other);
  ContextId merged = CloneLocked(base);
  Context& m = workspace_->contexts[merged];
  for (const auto& [id, concept_id] : other_view.instances) {
    if (!base_view.instances.count(id)) m.instances.emplace_back(id, concept_id);
  }
  std::set<RoleAssertion> seen(base_view.assertions.begin(), base_view.assertions.end());
  for (const auto& a : other_view.assertions) {
    if (seen.insert(a).second) m.assertions.push_back(a);
  }
  return merged;
}

ContextId KnowledgeBase::SubstituteInstance(ContextId ctx, InstanceId from, InstanceId to) {
  std::lock_guard lock(workspace_->mu);
  View view = ViewLocked(ctx);
  if (!view.instances.count(to)) {
    throw KbError("instance " + std::to_string(to) + " not found in context " +
                  std::to_string(ctx));
  }
  Context flat;
  for (const auto& [id, concept_id] : view.instances) {
    if (id != from) flat.instances.emplace_back(id, concept_id);
  }
  for (RoleAssertion a : view.assertions) {
    if (a.subject == from) a.subject = to;
    if (a.filler == from) a.filler = to;
    flat.assertions.push_back(a);
  }
  workspace_->contexts.push_back(std::move(flat));
  return static_cast<ContextId>(workspace_->contexts.size() - 1);
}

InterpretationGraph KnowledgeBase::ExtractInterpretation(ContextId ctx) const {
  std::lock_guard lock(workspace_->mu);
  View view = ViewLocked(ctx);
  InterpretationGraph g;
  for (const auto& [id, concept_id] : view.instances) {
    g.nodes.push_back({id, terminology_->concept_at(concept_id).name});
  }
  for (const auto& a : view.assertions) {
    g.triples.push_back({a.subject, terminology_->role_at(a.role).name, a.filler});
  }
  std::sort(g.nodes.begin(), g.nodes.end());
  std::sort(g.triples.begin(), g.triples.end());
  g.triples.erase(std::unique(g.triples.begin(), g.triples.end()), g.triples.end());
  return g;
}

std::optional<ContextId> KnowledgeBase::ParentOf(ContextId ctx) const {
  std::lock_guard lock(workspace_->mu);
  return ContextLocked(ctx).parent;
}

size_t KnowledgeBase::OwnAssertionCount(ContextId ctx) const {
  std::lock_guard lock(workspace_->mu);
  return ContextLocked(ctx).assertions.size();
}

size_t KnowledgeBase::OwnInstanceCount(ContextId ctx) const {
  std::lock_guard lock(workspace_->mu);
  return ContextLocked(ctx).instances.size();
}

size_t KnowledgeBase::context_count() const {
  std::lock_guard lock(workspace_->mu);
  return workspace_->contexts.size();
}

}  // namespace parsetalk
