#include <fstream>

#include "doctest.h"
#include "oracles/oracles.hpp"
#include "umt/error.hpp"
#include "umt/io.hpp"
#include "umt/mostowski.hpp"

using namespace umt;

namespace {

EpsilonModel fixture(const std::string& name) {
  std::ifstream in(std::string(UMT_TEST_DATA) + "/" + name);
  return model_from_json(json::parse(in));
}

EpsilonModel simple() { return EpsilonModel({"X", "a", "b", "s"}, {{"a", "X"}, {"b", "X"}, {"a", "s"}}, "X"); }

bool has_failure(const CheckReport& r, const std::string& what) {
  for (const auto& c : r.counterexamples())
    if (c.formula == what) return true;
  return false;
}

// Least n with nu_n[a, X], evaluated from the formulas themselves.
std::vector<int> levels_by_formula(const EpsilonModel& m) {
  std::vector<int> out(m.size(), -1);
  for (int n = 0; n <= m.size(); ++n) {
    Formula f = build_nu(n);
    for (int a = 0; a < m.size(); ++a)
      if (out[a] < 0 && eval_model(m, f, {{"y", m.id(a)}, {"x", m.id(m.base())}})) out[a] = n;
  }
  return out;
}

EpsilonModel random_base_model(oracle::Rng& rng) {
  while (true) {
    EpsilonModel m = oracle::random_model(rng, oracle::uniform(rng, 1, 7));
    if (check_base(m).holds) return m;
  }
}

}  // namespace

TEST_CASE("base check") {
  CHECK(check_base(simple()).holds);
  BaseVerdict chain = check_base(EpsilonModel({"X", "b", "c"}, {{"b", "X"}, {"c", "b"}}, "X"));
  CHECK_FALSE(chain.holds);
  CHECK(chain.witness == std::optional<std::pair<std::string, std::string>>({"c", "b"}));
  CHECK(check_base(EpsilonModel({"X"}, {}, "X")).holds);
  CHECK_THROWS_AS(EpsilonModel({"X", "X"}, {}, "X"), Error);
  CHECK_THROWS_AS(EpsilonModel({"X"}, {{"a", "X"}}, "X"), Error);
}

TEST_CASE("truncation") {
  EpsilonModel m = simple();
  CHECK(truncate(m) == m);
  EpsilonModel iso({"X", "a", "u"}, {{"a", "X"}, {"u", "u"}}, "X");
  EpsilonModel t = truncate(iso);
  CHECK(t.carrier() == std::vector<std::string>{"X", "a"});
  // A self-loop never reaches a level; the fixture keeps its loop node out.
  EpsilonModel cyc = truncate(fixture("model_cyclic.json"));
  CHECK(cyc.carrier() == std::vector<std::string>{"X", "a", "s"});
  CHECK_THROWS_AS(truncate(EpsilonModel({"X", "b", "c"}, {{"b", "X"}, {"c", "b"}}, "X")), PreconditionError);
}

TEST_CASE("levels match the nu formulas") {
  CHECK(nu_levels(simple()) == std::vector<int>{1, 0, 0, 1});
  oracle::Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    EpsilonModel m = random_base_model(rng);
    CHECK(nu_levels(m) == levels_by_formula(m));
  }
}

TEST_CASE("truncation is idempotent and transitive") {
  oracle::Rng rng(37);
  for (int i = 0; i < 100; ++i) {
    EpsilonModel m = random_base_model(rng);
    EpsilonModel t = truncate(m);
    CHECK(truncate(t) == t);
    for (int l : nu_levels(t)) CHECK(l >= 0);
    CheckReport sub = is_transitive_submodel(t.as_structure(), m.as_structure());
    CHECK_MESSAGE(sub.passed(), sub.summary());
  }
}

TEST_CASE("extensionality over the base") {
  CHECK(is_extensional_over(simple()).holds);
  ExtensionalityVerdict v = is_extensional_over(fixture("model_nonext.json"));
  CHECK_FALSE(v.holds);
  CHECK(v.witness == std::optional<std::pair<std::string, std::string>>({"s", "t"}));
  CHECK(is_extensional_over(fixture("model_ok.json")).holds);
  // Two empty nodes below X are atoms, so they may share predecessors.
  CHECK(is_extensional_over(EpsilonModel({"X", "a", "b"}, {{"a", "X"}, {"b", "X"}}, "X")).holds);
  CHECK_FALSE(is_extensional_over(EpsilonModel({"X", "e", "f"}, {}, "X")).holds);
}

TEST_CASE("collapse examples") {
  EpsilonModel m = simple();
  CollapseResult r = collapse(m);
  Entity a = Entity::atom("atom_a"), b = Entity::atom("atom_b");
  CHECK(r.h[1] == a);
  CHECK(r.h[2] == b);
  CHECK(r.h[0] == Entity::set({a, b}));
  CHECK(r.h[3] == Entity::set({a}));
  CHECK(r.image == Entity::set({a, b, Entity::set({a, b}), Entity::set({a})}));
  CHECK(r.levels == std::vector<int>{1, 0, 0, 1});
  CheckReport rep = verify_collapse(m, r);
  CHECK_MESSAGE(rep.passed(), rep.summary());

  try {
    collapse(EpsilonModel({"X", "a", "b", "s", "t"}, {{"a", "X"}, {"b", "X"}, {"a", "s"}, {"a", "t"}}, "X"));
    FAIL("expected an extensionality error");
  } catch (const PreconditionError& e) {
    CHECK(e.witness() == "s, t");
  }
  CHECK_THROWS_AS(collapse(EpsilonModel({"X", "a", "u"}, {{"a", "X"}, {"u", "u"}}, "X")), PreconditionError);
  CHECK_THROWS_AS(collapse(EpsilonModel({"X", "b", "c"}, {{"b", "X"}, {"c", "b"}}, "X")), PreconditionError);
  CHECK_THROWS_AS(collapse(EpsilonModel({"X", "a b"}, {{"a b", "X"}}, "X")), PreconditionError);
}

TEST_CASE("verification catches tampering") {
  EpsilonModel m = simple();
  CollapseResult merged = collapse(m);
  merged.h[3] = merged.h[0];
  merged.image = Entity::set(merged.h);
  CHECK(has_failure(verify_collapse(m, merged), "injective"));

  CollapseResult dropped = collapse(m);
  EntityList keep;
  for (Entity e : dropped.image.members())
    if (e != Entity::atom("atom_a")) keep.push_back(e);
  dropped.image = Entity::set(keep);
  CHECK(has_failure(verify_collapse(m, dropped), "transitive"));

  CollapseResult atom = collapse(m);
  atom.h[1] = Entity::set({});
  CHECK_FALSE(verify_collapse(m, atom).passed());
}

TEST_CASE("collapse is deterministic") {
  oracle::Rng rng(43);
  for (int i = 0; i < 20; ++i) {
    Entity e = oracle::random_small_entity(rng, {Entity::atom("a"), Entity::atom("b")}, 20);
    EpsilonModel m = epsilon_graph(e);
    CollapseResult r1 = collapse(m), r2 = collapse(m);
    CHECK(r1.h == r2.h);
    CHECK(r1.image == r2.image);
    CHECK(r1.levels == r2.levels);
  }
}

TEST_CASE("epsilon graphs collapse back to their entities") {
  oracle::Rng rng(47);
  EntityList atoms{Entity::atom("a"), Entity::atom("b"), Entity::atom("c")};
  for (int i = 0; i < 100; ++i) {
    Entity e = oracle::random_small_entity(rng, atoms, 50);
    EpsilonModel m = epsilon_graph(e);
    REQUIRE(truncate(m) == m);
    CollapseResult r = collapse(m);
    CHECK(r.h[m.index_of(e.str())] == rename_atoms_for_collapse(e));
    // Every node named by an entity literal goes to the renamed entity.
    for (int k = 0; k < m.size(); ++k) {
      if (k == m.base() && m.id(k) == "X") continue;
      CHECK(r.h[k] == rename_atoms_for_collapse(parse_entity(m.id(k))));
    }
    CheckReport rep = verify_collapse(m, r, 1);
    CHECK_MESSAGE(rep.passed(), rep.summary());
  }
}

TEST_CASE("epsilon graph shape") {
  EpsilonModel m = epsilon_graph(parse_entity("{{b},a}"));
  CHECK(m.id(m.base()) == "X");
  CHECK(m.size() == 5);
  EpsilonModel reused = epsilon_graph(parse_entity("{{a},a}"));
  CHECK(reused.id(reused.base()) == "{a}");
  CHECK(reused.size() == 3);
  EpsilonModel pure = epsilon_graph(parse_entity("{{}}"));
  CHECK(pure.id(pure.base()) == "{}");
}
