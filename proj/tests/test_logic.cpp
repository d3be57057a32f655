#include "doctest.h"
#include "oracles/oracles.hpp"
#include "umt/error.hpp"
#include "umt/logic.hpp"
#include "umt/superstructure.hpp"

using namespace umt;

namespace {

Language sample_language() {
  Language l;
  l.relations = {{"P", 1}, {"R", 2}};
  l.functions = {{"c", 0}, {"g", 1}};
  return l;
}

const std::vector<std::string> kVars{"x", "y", "z"};

Term random_term(oracle::Rng& rng, bool first_order, int depth) {
  int pick = oracle::uniform(rng, 0, first_order ? 5 : 6);
  if (pick <= 2 || depth == 0) return Term::var(kVars[oracle::uniform(rng, 0, 2)]);
  if (pick == 3) return Term::constant("c");
  if (pick <= 5) return Term::apply("g", {random_term(rng, first_order, depth - 1)});
  EntityList atoms{Entity::atom("a"), Entity::atom("b")};
  return Term::of(oracle::random_entity(rng, atoms, 2, 2));
}

// Formulas over all connectives; first_order excludes membership and
// bounded quantifiers.
Formula random_formula(oracle::Rng& rng, int depth, bool first_order) {
  int top = depth == 0 ? 2 : (first_order ? 9 : 11);
  int pick = oracle::uniform(rng, 0, top);
  std::string v = kVars[oracle::uniform(rng, 0, 2)];
  switch (pick) {
    case 0: return Formula::eq(random_term(rng, first_order, 1), random_term(rng, first_order, 1));
    case 1: return Formula::rel("P", {random_term(rng, first_order, 1)});
    case 2:
      if (first_order)
        return Formula::rel("R", {random_term(rng, first_order, 1), random_term(rng, first_order, 1)});
      return Formula::mem(random_term(rng, first_order, 1), random_term(rng, first_order, 1));
    case 3: return Formula::neg(random_formula(rng, depth - 1, first_order));
    case 4: return Formula::conj(random_formula(rng, depth - 1, first_order), random_formula(rng, depth - 1, first_order));
    case 5: return Formula::disj(random_formula(rng, depth - 1, first_order), random_formula(rng, depth - 1, first_order));
    case 6: return Formula::implies(random_formula(rng, depth - 1, first_order), random_formula(rng, depth - 1, first_order));
    case 7: return Formula::iff(random_formula(rng, depth - 1, first_order), random_formula(rng, depth - 1, first_order));
    case 8: return Formula::forall(v, random_formula(rng, depth - 1, first_order));
    case 9: return Formula::exists(v, random_formula(rng, depth - 1, first_order));
    case 10: return Formula::bforall(v, Term::var(kVars[oracle::uniform(rng, 0, 2)]), random_formula(rng, depth - 1, first_order));
    default: return Formula::bexists(v, Term::var(kVars[oracle::uniform(rng, 0, 2)]), random_formula(rng, depth - 1, first_order));
  }
}

Entity ent(const std::string& s) { return parse_entity(s); }

}  // namespace

TEST_CASE("parse examples") {
  Language l = sample_language();
  Formula f = parse_formula("forall x . P(x) -> exists y . R(x, y)", l);
  CHECK(f.kind() == FKind::Forall);
  CHECK(f.left().kind() == FKind::Implies);
  CHECK(to_string(f) == "forall x . P(x) -> (exists y . R(x, y))");

  CHECK(parse_formula("x != y").kind() == FKind::Not);
  CHECK(parse_formula("x notin y") == Formula::neg(Formula::mem(Term::var("x"), Term::var("y"))));
  CHECK(parse_formula("x = x -> y = y -> z = z").right().kind() == FKind::Implies);
  Formula b = parse_formula("forall u in C_{{a,b}} . u in x");
  CHECK(b.kind() == FKind::BForall);
  CHECK(b.bound().kind == Term::Kind::Entity);
  CHECK(b.bound().entity == ent("{a,b}"));
  CHECK(parse_formula("P(c) and g(c) = c", l).kind() == FKind::And);
}

TEST_CASE("parse errors carry positions") {
  Language l = sample_language();
  CHECK_THROWS_AS(parse_formula("P(x, y)", l), ParseError);
  CHECK_THROWS_AS(parse_formula("forall P . x = x", l), ParseError);
  CHECK_THROWS_AS(parse_formula("x = ", l), ParseError);
  CHECK_THROWS_AS(parse_formula("Q(x)", l), ParseError);
  CHECK_THROWS_AS(parse_formula("x = C_{a,}"), ParseError);
  try {
    parse_formula("x = x and\n  y", l);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("random formulas survive print and parse") {
  Language l = sample_language();
  oracle::Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    Formula f = random_formula(rng, oracle::uniform(rng, 0, 6), i % 2 == 0);
    std::string s = to_string(f);
    Formula g = parse_formula(s, l);
    CHECK_MESSAGE(g == f, s);
  }
}

TEST_CASE("free variables and boundedness") {
  Language l = sample_language();
  CHECK(free_variables(parse_formula("forall x . R(x, y)", l)) == std::set<std::string>{"y"});
  CHECK(free_variables(parse_formula("forall x in x . x = x")) == std::set<std::string>{"x"});
  CHECK(free_variables(parse_formula("exists u in v . u in w")) == std::set<std::string>{"v", "w"});
  CHECK(is_bounded(parse_formula("forall u in v . u in v")));
  CHECK_FALSE(is_bounded(parse_formula("forall u . u in v")));
  CHECK(all_variables(parse_formula("forall u in v . u = u")) == std::set<std::string>{"u", "v"});
  CHECK(depth(parse_formula("x = y")) == 0);
  CHECK(depth(parse_formula("forall x . not x = y")) == 2);
  CHECK(depth(parse_formula("exists x . x = y")) == 3);
}

TEST_CASE("fresh names avoid reserved and issued names") {
  FreshNames fresh({"z", "z1"});
  std::string a = fresh.next("z");
  std::string b = fresh.next("z");
  CHECK(a != "z");
  CHECK(a != "z1");
  CHECK(a != b);
}

TEST_CASE("definition builders produce bounded formulas") {
  std::vector<PhiKind> kinds{PhiKind::Empty,   PhiKind::FiniteSet, PhiKind::Tuple,
                             PhiKind::Subset,  PhiKind::Product,   PhiKind::Function,
                             PhiKind::VnMember, PhiKind::VnSet};
  for (PhiKind k : kinds)
    for (int n = 1; n <= 4; ++n) {
      Formula f = build_phi(k, n);
      CHECK(is_bounded(f));
      auto args = phi_arguments(k, n);
      std::set<std::string> want(args.begin(), args.end());
      CHECK(free_variables(f) == want);
      CHECK(phi_kind_from_string(phi_kind_name(k)) == k);
    }
  CHECK(to_string(build_phi(PhiKind::Empty)) == "forall y in x . y != y");
  CHECK(to_string(build_phi(PhiKind::VnMember, 0)) == "y in x");
  CHECK_THROWS_AS(build_phi(PhiKind::Tuple, 0), Error);
  CHECK_THROWS_AS(phi_kind_from_string("nope"), Error);
  for (int n = 0; n <= 4; ++n) {
    CHECK(is_bounded(build_nu(n)));
    CHECK(free_variables(build_nu(n)) == std::set<std::string>{"x", "y"});
  }
  CHECK(free_variables(build_base()) == std::set<std::string>{"x"});
}

TEST_CASE("definition examples") {
  Entity a = Entity::atom("a"), b = Entity::atom("b");
  CHECK(eval_bounded(build_phi(PhiKind::Empty), {{"x", Entity::empty_set()}}));
  CHECK_FALSE(eval_bounded(build_phi(PhiKind::Empty), {{"x", ent("{a}")}}));
  CHECK(eval_bounded(build_phi(PhiKind::Tuple, 2), {{"x", ent("{{a},{a,b}}")}, {"y1", a}, {"y2", b}}));
  CHECK_FALSE(eval_bounded(build_phi(PhiKind::Tuple, 2), {{"x", ent("{{a},{a,b}}")}, {"y1", b}, {"y2", a}}));
  CHECK(eval_bounded(build_phi(PhiKind::FiniteSet, 2), {{"x", ent("{a,b}")}, {"y1", b}, {"y2", a}}));
  // base set X = {a}: {a} is in V_1 but {{a}} is not.
  CHECK(eval_bounded(build_phi(PhiKind::VnMember, 1), {{"x", ent("{a}")}, {"y", ent("{a}")}}));
  CHECK_FALSE(eval_bounded(build_phi(PhiKind::VnMember, 1), {{"x", ent("{a}")}, {"y", ent("{{a}}")}}));
  CHECK(eval_bounded(build_nu(1), {{"x", ent("{a,b}")}, {"y", ent("{a}")}}));
  CHECK(eval_bounded(build_nu(0), {{"x", ent("{a,b}")}, {"y", a}}));
  CHECK(eval_bounded(build_base(), {{"x", ent("{a,b}")}}));
  CHECK_FALSE(eval_bounded(build_base(), {{"x", ent("{a,{b}}")}}));
}

TEST_CASE("hyperfinite certificate examples") {
  // Numerals 0..3 with their order and power set as parameters.
  EntityList nums;
  for (int i = 0; i < 4; ++i) nums.push_back(Entity::atom(std::to_string(i)));
  EntityList lt;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) lt.push_back(oracle::pair(nums[i], nums[j]));
  Entity N = Entity::set(nums);
  Env env{{"N", N}, {"Lt", Entity::set(lt)}, {"PN", sets::power(N)}};
  Formula psi = build_psi_hyperfinite();
  CHECK(is_bounded(psi));

  Entity a = Entity::atom("a"), b = Entity::atom("b");
  Env two = env;
  two["A"] = Entity::set({a, b});
  two["n"] = nums[2];
  two["f"] = Entity::set({oracle::pair(nums[0], a), oracle::pair(nums[1], b)});
  CHECK(eval_bounded(psi, two));
  two["f"] = Entity::set({oracle::pair(nums[0], a), oracle::pair(nums[1], a)});
  CHECK_FALSE(eval_bounded(psi, two));

  Env zero = env;
  zero["A"] = Entity::empty_set();
  zero["n"] = nums[0];
  zero["f"] = Entity::empty_set();
  CHECK(eval_bounded(psi, zero));

  // Two elements cannot be counted by one numeral with any f.
  Env one = env;
  one["A"] = Entity::set({a, b});
  one["n"] = nums[1];
  EntityList cells{oracle::pair(nums[0], a), oracle::pair(nums[0], b)};
  for (int m = 0; m < 4; ++m) {
    EntityList f;
    for (int i = 0; i < 2; ++i)
      if ((m >> i) & 1) f.push_back(cells[i]);
    one["f"] = Entity::set(f);
    CHECK_FALSE(eval_bounded(psi, one));
  }
}

TEST_CASE("star transform renames entity constants") {
  Formula f = parse_formula("forall u in C_{{a}} . u in C_{{a,b}}");
  std::map<Entity, Entity> m{{ent("{a}"), ent("{c}")}, {ent("{a,b}"), ent("{c,d}")}};
  Formula g = star_transform(f, m);
  CHECK(to_string(g) == "forall u in C_{{c}} . u in C_{{c,d}}");
  CHECK(entity_constants(g) == std::set<Entity>{ent("{c}"), ent("{c,d}")});
  CHECK(free_variables(g) == free_variables(f));
  CHECK_THROWS_AS(star_transform(f, {{ent("{a}"), ent("{c}")}}), PreconditionError);
  CHECK(uses_symbols(parse_formula("P(x)", sample_language())));
  CHECK_FALSE(uses_symbols(f));
}

TEST_CASE("normalization preserves first-order satisfaction") {
  Language l;
  l.relations = {{"P", 1}, {"R", 2}};
  l.functions = {{"c", 0}};
  std::vector<Structure> structs = oracle::all_structures(l, 2);
  auto one = oracle::all_structures(l, 1);
  structs.insert(structs.end(), one.begin(), one.end());
  oracle::Rng rng(17);
  auto gen = [&](int d) {
    // Drop g: regenerate until the formula avoids it.
    while (true) {
      Formula f = random_formula(rng, d, true);
      if (to_string(f).find("g(") == std::string::npos) return f;
    }
  };
  for (int i = 0; i < 60; ++i) {
    Formula f = gen(oracle::uniform(rng, 1, 4));
    Formula n = normalize(f);
    for (std::size_t k = 0; k < structs.size(); k += 7) {
      const Structure& s = structs[k];
      for (const auto& x : s.universe())
        for (const auto& y : s.universe())
          for (const auto& z : s.universe()) {
            Assignment a{{"x", x}, {"y", y}, {"z", z}};
            bool direct = satisfies(s, f, a);
            CHECK(direct == satisfies(s, n, a));
            CHECK(direct == oracle::satisfies_by_expansion(s, f, a));
          }
    }
  }
}
