#include "doctest.h"
#include "oracles/oracles.hpp"
#include "umt/error.hpp"
#include "umt/superstructure.hpp"

using namespace umt;

namespace {

Entity ent(const std::string& s) { return parse_entity(s); }

EntityList ab() { return {Entity::atom("a"), Entity::atom("b")}; }

bool phi(PhiKind k, int n, const std::vector<Entity>& args) {
  auto names = phi_arguments(k, n);
  Env env;
  for (std::size_t i = 0; i < names.size(); ++i) env[names[i]] = args[i];
  return eval_bounded(build_phi(k, n), env);
}

}  // namespace

TEST_CASE("rank over a base set") {
  EntityList base = ab();
  CHECK(rank_over(Entity::atom("a"), base) == 0);
  CHECK(rank_over(ent("{a}"), base) == 1);
  CHECK(rank_over(ent("{{a},{a,b}}"), base) == 2);
  CHECK(rank_over(Entity::empty_set(), base) == 1);
  CHECK_THROWS_AS(rank_over(ent("{c}"), base), PreconditionError);
  CHECK(in_level(ent("(a,b)"), base, 2));
  CHECK_FALSE(in_level(ent("(a,b)"), base, 1));
  CHECK(atoms_of(ent("{{a},{}}")) == EntityList{Entity::atom("a")});
}

TEST_CASE("levels by enumeration and by recurrence") {
  EntityList base = ab();
  CHECK(enumerate_vn(base, 0).size() == 2);
  CHECK(enumerate_vn(base, 1).size() == 6);
  CHECK(enumerate_vn(base, 2).size() == 66);
  CHECK(vn_size(2, 1) == std::optional<std::size_t>(6));
  CHECK(vn_size(2, 2) == std::optional<std::size_t>(66));
  CHECK_FALSE(vn_size(2, 3));
  CHECK(oracle::vn_recurrence(2, 2) == 66);
  CHECK_THROWS_AS(enumerate_vn(base, 3), CapExceeded);
  CHECK_THROWS_AS(enumerate_vn(base, 2, 10), CapExceeded);
  EntityList v1 = enumerate_vn({Entity::atom("a")}, 1);
  CHECK(v1 == canonical_list({Entity::atom("a"), Entity::empty_set(), ent("{a}")}));
}

TEST_CASE("each level is the base plus the power set of the previous") {
  for (const EntityList& base : {EntityList{Entity::atom("a")}, ab()})
    for (int n = 0; n <= 2; ++n) {
      EntityList v = enumerate_vn(base, n);
      std::set<Entity> want = oracle::vn_by_powers(base, n);
      CHECK(std::set<Entity>(v.begin(), v.end()) == want);
      // Transitive over sets: members of set elements are elements.
      for (Entity e : v)
        for (Entity m : e.members()) CHECK(want.count(m));
      for (Entity e : v) CHECK(rank_over(e, base) <= n);
    }
}

TEST_CASE("set operations") {
  Entity a = Entity::atom("a"), b = Entity::atom("b");
  CHECK(sets::unite(ent("{a}"), ent("{b}")) == ent("{a,b}"));
  CHECK(sets::intersect(ent("{a,b}"), ent("{b}")) == ent("{b}"));
  CHECK(sets::minus(ent("{a,b}"), ent("{b}")) == ent("{a}"));
  CHECK(sets::product(ent("{a}"), ent("{a,b}")) == Entity::set({oracle::pair(a, a), oracle::pair(a, b)}));
  CHECK(sets::power(ent("{a}")) == ent("{{},{a}}"));
  CHECK(sets::big_union(ent("{{a},{b}}")) == ent("{a,b}"));
  CHECK(sets::big_intersection(ent("{{a,b},{b}}")) == ent("{b}"));
  Entity f = Entity::set({oracle::pair(a, b), oracle::pair(b, b)});
  CHECK(sets::is_function(f));
  CHECK(sets::is_function_between(f, ent("{a,b}"), ent("{b}")));
  CHECK(sets::domain(f) == ent("{a,b}"));
  CHECK(sets::range(f) == ent("{b}"));
  CHECK(sets::apply(f, a) == std::optional<Entity>(b));
  CHECK_FALSE(sets::is_injective(f));
  CHECK(sets::inverse(f) == Entity::set({oracle::pair(b, a), oracle::pair(b, b)}));
  CHECK(sets::compose(f, sets::inverse(f)) == sets::product(ent("{a,b}"), ent("{a,b}")));
  CHECK(sets::image(f, ent("{a}")) == ent("{b}"));
  CHECK(sets::preimage(f, ent("{b}")) == ent("{a,b}"));
  CHECK(sets::function_space(ent("{a}"), ent("{b}")) == Entity::set({Entity::set({oracle::pair(a, b)})}));
  CHECK(sets::function_space(ent("{a,b}"), ent("{a,b}")).size() == 4);
  CHECK(sets::of_atoms({"b", "a"}) == ent("{a,b}"));
  CHECK_THROWS_AS(sets::unite(a, ent("{b}")), Error);
  CHECK_THROWS_AS(sets::big_intersection(Entity::empty_set()), Error);
  // Choice functions of i -> A_i.
  Entity fam = Entity::set({oracle::pair(a, ent("{a,b}")), oracle::pair(b, ent("{a}"))});
  Entity prod = sets::indexed_product(fam);
  CHECK(prod.size() == 2);
  for (Entity g : prod.members()) CHECK(sets::is_function(g));
}

TEST_CASE("bounded evaluation examples") {
  CHECK(phi(PhiKind::Empty, 0, {Entity::empty_set()}));
  CHECK(phi(PhiKind::Subset, 0, {ent("{a}"), ent("{a,b}")}));
  CHECK_FALSE(phi(PhiKind::Subset, 0, {ent("{a,b}"), ent("{a}")}));
  CHECK(eval_bounded(parse_formula("forall x in C_{a} . x != x")));
  CHECK_FALSE(eval_bounded(parse_formula("exists x in C_{a} . x = x")));
  CHECK(eval_bounded(parse_formula("C_{{a,b}} = C_{{b,a}}")));
  CHECK(eval_bounded(parse_formula("exists u in v . u = C_{a}"), {{"v", ent("{a}")}}));
  CHECK_THROWS_AS(eval_bounded(parse_formula("forall x . x = x")), Error);
  CHECK_THROWS_AS(eval_bounded(parse_formula("x in y"), {{"x", Entity::atom("a")}}), Error);
}

TEST_CASE("transitive and supertransitive sets") {
  CHECK(is_transitive(ent("{a,b}")));
  CHECK_FALSE(is_transitive(ent("{{a}}")));
  Entity t = build_supertransitive(ent("{a,b}"));
  CHECK(t.size() == 6);
  CHECK(is_supertransitive(t));
  CHECK_FALSE(is_supertransitive(ent("{a,b,{a}}")));
  CHECK_THROWS_AS(build_supertransitive(ent("{{a}}")), PreconditionError);
  EntityList tc = transitive_closure({ent("{{a}}")});
  CHECK(std::set<Entity>(tc.begin(), tc.end()) ==
        std::set<Entity>{ent("{{a}}"), ent("{a}"), Entity::atom("a")});
}

TEST_CASE("closure properties") {
  CheckReport two = check_closure_properties(ab(), 2);
  CHECK_MESSAGE(two.passed(), two.summary());
  CHECK(check_closure_properties({Entity::atom("a")}, 1).passed());
  CHECK(in_level(ent("(a,b)"), ab(), 2));
  CHECK(in_level(sets::function_space(ent("{a}"), ent("{b}")), ab(), 4));
}

TEST_CASE("definitions agree with native predicates over level two") {
  EntityList v = enumerate_vn(ab(), 2);
  for (Entity x : v) {
    CHECK(phi(PhiKind::Empty, 0, {x}) == oracle::has_no_members(x));
    for (Entity y : v) {
      // Atoms make the bounded quantifier vacuous, so only sets apply.
      if (x.is_set() && y.is_set()) CHECK(phi(PhiKind::Subset, 0, {x, y}) == oracle::subset_of(x, y));
      CHECK(phi(PhiKind::FiniteSet, 1, {x, y}) == oracle::equals_listed(x, {y}));
    }
  }
  // Three-argument definitions on a seeded sample of triples.
  oracle::Rng rng(31);
  auto pick = [&] { return v[oracle::uniform(rng, 0, static_cast<int>(v.size()) - 1)]; };
  for (int i = 0; i < 20000; ++i) {
    Entity x = pick(), y = pick(), z = pick();
    bool sets_only = y.is_set() && z.is_set() && x.is_set();
    if (sets_only) {
      CHECK(phi(PhiKind::Product, 0, {x, y, z}) == oracle::is_product_of(x, y, z));
      CHECK(phi(PhiKind::Function, 0, {x, y, z}) == oracle::is_function_from_to(x, y, z));
    }
    CHECK(phi(PhiKind::Tuple, 2, {x, y, z}) == (x == oracle::pair(y, z)));
    CHECK(phi(PhiKind::FiniteSet, 2, {x, y, z}) == oracle::equals_listed(x, {y, z}));
  }
  // Hits for the rare positive cases.
  Entity a = Entity::atom("a"), b = Entity::atom("b");
  CHECK(phi(PhiKind::Product, 0, {sets::product(ent("{a}"), ent("{a,b}")), ent("{a}"), ent("{a,b}")}));
  CHECK(phi(PhiKind::Function, 0, {Entity::set({oracle::pair(a, b)}), ent("{a}"), ent("{b}")}));
  CHECK(phi(PhiKind::Tuple, 3, {oracle::tuple_of({a, b, a}), a, b, a}));
}

TEST_CASE("level definitions agree with rank") {
  EntityList base = ab();
  Entity X = Entity::set(base);
  oracle::Rng rng(8);
  std::vector<Entity> sample;
  while (sample.size() < 200) sample.push_back(oracle::random_small_entity(rng, base, 30));
  sample.push_back(ent("{{{a}}}"));
  for (Entity y : sample)
    for (int n = 0; n <= 3; ++n) {
      int r = oracle::rank_of(y);
      CHECK(phi(PhiKind::VnMember, n, {X, y}) == (r <= n));
      CHECK(phi(PhiKind::VnSet, n, {X, y}) == (r <= n && y.is_set()));
      CHECK(in_level(y, base, n) == (r <= n));
    }
}

TEST_CASE("normalization preserves bounded truth") {
  oracle::Rng rng(12);
  EntityList base = ab();
  std::vector<std::string> vars{"x", "y", "z"};
  std::function<Formula(int)> gen = [&](int d) -> Formula {
    auto v = [&] { return Term::var(vars[oracle::uniform(rng, 0, 2)]); };
    switch (d == 0 ? oracle::uniform(rng, 0, 1) : oracle::uniform(rng, 0, 8)) {
      case 0: return Formula::mem(v(), v());
      case 1: return Formula::eq(v(), v());
      case 2: return Formula::neg(gen(d - 1));
      case 3: return Formula::conj(gen(d - 1), gen(d - 1));
      case 4: return Formula::disj(gen(d - 1), gen(d - 1));
      case 5: return Formula::implies(gen(d - 1), gen(d - 1));
      case 6: return Formula::iff(gen(d - 1), gen(d - 1));
      case 7: return Formula::bforall(vars[oracle::uniform(rng, 0, 2)], v(), gen(d - 1));
      default: return Formula::bexists(vars[oracle::uniform(rng, 0, 2)], v(), gen(d - 1));
    }
  };
  for (int i = 0; i < 400; ++i) {
    Formula f = gen(oracle::uniform(rng, 1, 4));
    Formula n = normalize(f);
    CHECK(is_bounded(n));
    for (int k = 0; k < 5; ++k) {
      Env env;
      for (const auto& x : vars) env[x] = oracle::random_small_entity(rng, base, 12);
      CHECK(eval_bounded(f, env) == eval_bounded(n, env));
    }
  }
}

TEST_CASE("structure encoding and bar formulas") {
  Language l;
  l.relations = {{"R", 2}};
  Structure s(l, {"a", "b"});
  s.add_tuple("R", {0, 1});
  std::map<std::string, Entity> emap{{"a", Entity::atom("a")}, {"b", Entity::atom("b")}};
  Entity code = encode_structure(s, emap);
  Entity a = Entity::atom("a"), b = Entity::atom("b");
  CHECK(code == oracle::pair(ent("{a,b}"), Entity::set({oracle::pair(a, b)})));
  Entity T = Entity::set(transitive_closure({code}));
  CHECK(is_transitive(T));

  auto agree = [&](const Structure& st, const Entity& c, const std::string& text) {
    Formula f = parse_formula(text, l);
    BarFormula bar = bar_formula(f, l);
    CHECK(is_bounded(bar.formula));
    Entity tt = Entity::set(transitive_closure({c}));
    for (const auto& x : st.universe())
      for (const auto& y : st.universe()) {
        Env env{{bar.structure_var, c}, {bar.transitive_var, tt}, {"x", emap.at(x)}, {"y", emap.at(y)}};
        CHECK(eval_bounded(bar.formula, env) == satisfies(st, f, {{"x", x}, {"y", y}}));
      }
  };
  agree(s, code, "R(x, y)");
  agree(s, code, "x = y");
  agree(s, code, "exists z . R(z, z)");
  agree(s, code, "forall z . R(x, z) -> exists w . R(w, z) and not w = y");

  // Every relation on two elements.
  for (const auto& st : oracle::all_structures(l, 2)) {
    std::map<std::string, Entity> m{{"0", a}, {"1", b}};
    emap = {{"0", a}, {"1", b}};
    Entity c = encode_structure(st, m);
    agree(st, c, "R(x, y) and exists z . R(y, z) or forall z . not R(z, x)");
  }

  Language fl;
  fl.functions = {{"g", 1}};
  CHECK_THROWS_AS(bar_formula(parse_formula("g(x) = x", fl), fl), Error);
}
