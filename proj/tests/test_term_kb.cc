#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.h"
#include "parsetalk/term_kb.h"

using namespace parsetalk;
using namespace parsetalk::testing;

namespace {

// Reference model: every context is a full, independent copy.
struct DeepContext {
  std::map<InstanceId, std::string> instances;
  std::multiset<InterpretationGraph::Triple> triples;
};

InterpretationGraph ToGraph(const DeepContext& c) {
  InterpretationGraph g;
  for (const auto& [id, name] : c.instances) g.nodes.push_back({id, name});
  g.triples.assign(c.triples.begin(), c.triples.end());
  return g;
}

}  // namespace

TEST_CASE("taxonomy subsumption") {
  Fixture f;
  const Terminology& t = f.kb.terminology();
  CHECK(t.Subsumes("PRODUCT", "PRINTER"));
  CHECK(t.Subsumes("PRINTER", "LASER-PRINTER"));
  CHECK(t.Subsumes("THING", "ZENON"));
  CHECK_FALSE(t.Subsumes("PRINTER", "PRODUCT"));
  CHECK(t.Subsumes("PRICEABLE", "SELL"));
  CHECK(t.Subsumes("TRANSACTION", "SELL"));
  CHECK_THROWS_AS(t.ConceptIdOf("NOPE"), KbError);
}

TEST_CASE("malformed knowledge bases are rejected") {
  CHECK_THROWS_AS(Terminology::Parse("[]"), KbError);
  CHECK_THROWS_AS(Terminology::Parse(R"({"concepts": [{"name": "A", "parents": ["B"]}],
      "roles": []})"),
                  KbError);
  CHECK_THROWS_AS(Terminology::Parse(R"({"concepts": [{"name": "A", "parents": ["B"]},
      {"name": "B", "parents": ["A"]}], "roles": []})"),
                  KbError);
  CHECK_THROWS_AS(Terminology::Parse(R"({"concepts": [{"name": "A"}],
      "roles": [{"name": "R", "domain": "A", "range": "Z"}]})"),
                  KbError);
}

TEST_CASE("concept check consults domain and range") {
  Fixture f;
  KnowledgeBase kb = f.kb.Fresh();
  const Terminology& t = kb.terminology();
  const ContextId ctx = kb.CloneContext(kb.root_context());
  const auto sell = kb.AssertInstance(ctx, t.ConceptIdOf("SELL"));
  const auto zenon = kb.AssertInstance(ctx, t.ConceptIdOf("ZENON"));
  const auto printer = kb.AssertInstance(ctx, t.ConceptIdOf("PRINTER"));
  MetricsRecord m;
  const auto ok = kb.ConceptCheck(ctx, sell, t.RoleIdOf("AGENT"), zenon, m);
  REQUIRE(ok);
  CHECK(kb.ExtractInterpretation(*ok).triples.size() == 1);
  CHECK(kb.ExtractInterpretation(ctx).triples.empty());
  CHECK_FALSE(kb.ConceptCheck(ctx, sell, t.RoleIdOf("AGENT"), printer, m));
  CHECK_FALSE(kb.ConceptCheck(ctx, printer, t.RoleIdOf("AGENT"), zenon, m));
  CHECK(m.concept_checks() == 3);
  CHECK_THROWS_AS(kb.ConceptCheck(kb.root_context(), sell, t.RoleIdOf("AGENT"), zenon, m),
                  KbError);
}

TEST_CASE("a cloned context is frozen") {
  Fixture f;
  KnowledgeBase kb = f.kb.Fresh();
  const ContextId ctx = kb.CloneContext(kb.root_context());
  kb.CloneContext(ctx);
  CHECK_THROWS_AS(kb.AssertInstance(ctx, kb.terminology().ConceptIdOf("PRINTER")), KbError);
  CHECK_THROWS_AS(kb.CloneContext(999), KbError);
}

TEST_CASE("instance ids are unique across contexts") {
  Fixture f;
  KnowledgeBase kb = f.kb.Fresh();
  const ConceptId p = kb.terminology().ConceptIdOf("PRINTER");
  std::set<InstanceId> ids;
  for (int i = 0; i < 10; ++i) {
    ids.insert(kb.AssertInstance(kb.CloneContext(kb.root_context()), p).id);
  }
  CHECK(ids.size() == 10);
}

TEST_CASE("substitution rewrites assertions and drops the replaced instance") {
  Fixture f;
  KnowledgeBase kb = f.kb.Fresh();
  const Terminology& t = kb.terminology();
  ContextId ctx = kb.CloneContext(kb.root_context());
  const auto sell = kb.AssertInstance(ctx, t.ConceptIdOf("SELL"));
  const auto zenon = kb.AssertInstance(ctx, t.ConceptIdOf("ZENON"));
  const auto company = kb.AssertInstance(ctx, t.ConceptIdOf("COMPANY"));
  MetricsRecord m;
  ctx = *kb.ConceptCheck(ctx, sell, t.RoleIdOf("AGENT"), company, m);
  const ContextId out = kb.SubstituteInstance(ctx, company.id, zenon.id);
  const auto g = kb.ExtractInterpretation(out);
  CHECK(g.nodes.size() == 2);
  REQUIRE(g.triples.size() == 1);
  CHECK(g.triples[0].filler == zenon.id);
  // Idempotent, and an instance without assertions is just dropped.
  CHECK(kb.ExtractInterpretation(kb.SubstituteInstance(out, company.id, zenon.id)) == g);
  CHECK_THROWS_AS(kb.SubstituteInstance(ctx, zenon.id, 12345), KbError);
}

TEST_CASE("copy-on-write contexts match a deep-copy model") {
  Fixture f;
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    KnowledgeBase kb = f.kb.Fresh();
    const Terminology& t = kb.terminology();
    std::map<ContextId, DeepContext> model;
    std::set<ContextId> frozen;
    model[kb.root_context()] = {};
    MetricsRecord m;
    auto pick = [&]() {
      auto it = model.begin();
      std::advance(it, rng() % model.size());
      return it->first;
    };
    for (int step = 0; step < 60; ++step) {
      const ContextId c = pick();
      switch (rng() % 4) {
        case 0: {
          const ContextId child = kb.CloneContext(c);
          model[child] = model[c];
          frozen.insert(c);
          break;
        }
        case 1: {
          if (frozen.count(c)) break;
          const ConceptId concept_id = static_cast<ConceptId>(rng() % t.concept_count());
          const auto ref = kb.AssertInstance(c, concept_id);
          model[c].instances[ref.id] = t.concept_at(concept_id).name;
          break;
        }
        case 2: {
          const auto& inst = model[c].instances;
          if (inst.empty()) break;
          auto a = inst.begin();
          std::advance(a, rng() % inst.size());
          auto b = inst.begin();
          std::advance(b, rng() % inst.size());
          const RoleId role = static_cast<RoleId>(rng() % t.role_count());
          const auto out = kb.ConceptCheck(c, {a->first, c}, role, {b->first, c}, m);
          const RoleDef& def = t.role_at(role);
          const bool expect = t.Subsumes(def.domain, t.ConceptIdOf(a->second)) &&
                              t.Subsumes(def.range, t.ConceptIdOf(b->second));
          REQUIRE(out.has_value() == expect);
          if (out) {
            DeepContext copy = model[c];
            copy.triples.insert({a->first, def.name, b->first});
            model[*out] = copy;
            frozen.insert(c);
          }
          break;
        }
        case 3: {
          const ContextId other = pick();
          const ContextId merged = kb.MergeContexts(c, other);
          DeepContext copy = model[c];
          for (const auto& [id, name] : model[other].instances) copy.instances[id] = name;
          std::set<InterpretationGraph::Triple> seen(copy.triples.begin(), copy.triples.end());
          for (const auto& tr : model[other].triples) {
            if (seen.insert(tr).second) copy.triples.insert(tr);
          }
          model[merged] = copy;
          frozen.insert(c);
          break;
        }
      }
      for (const auto& [id, deep] : model) {
        REQUIRE(kb.ExtractInterpretation(id) == ToGraph(deep));
      }
    }
  }
}

TEST_CASE("concept check success is monotone in the filler concept") {
  Fixture f;
  KnowledgeBase kb = f.kb.Fresh();
  const Terminology& t = kb.terminology();
  MetricsRecord m;
  for (RoleId r = 0; r < static_cast<RoleId>(t.role_count()); ++r) {
    const ConceptId domain = t.role_at(r).domain;
    for (ConceptId c = 0; c < static_cast<ConceptId>(t.concept_count()); ++c) {
      for (ConceptId d = 0; d < static_cast<ConceptId>(t.concept_count()); ++d) {
        if (!t.Subsumes(c, d)) continue;
        const ContextId ctx = kb.CloneContext(kb.root_context());
        const auto head = kb.AssertInstance(ctx, domain);
        const auto general = kb.AssertInstance(ctx, c);
        const auto specific = kb.AssertInstance(ctx, d);
        if (kb.ConceptCheck(ctx, head, r, general, m)) {
          CHECK(kb.ConceptCheck(ctx, head, r, specific, m));
        }
      }
    }
  }
}
