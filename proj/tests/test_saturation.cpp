#include <bit>

#include "doctest.h"
#include "oracles/oracles.hpp"
#include "umt/error.hpp"
#include "umt/saturation.hpp"

using namespace umt;

namespace {

Entity ent(const std::string& s) { return parse_entity(s); }

IndexSet indices(int n) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  return IndexSet(ids);
}

std::vector<std::string> ground(int n) {
  std::vector<std::string> g;
  for (int i = 0; i < n; ++i) g.push_back(std::to_string(i));
  return g;
}

EntityList atoms(const std::vector<std::string>& names) {
  EntityList out;
  for (const auto& n : names) out.push_back(Entity::atom(n));
  return out;
}

StarMapContext numbers_ctx() {
  return StarMapContext(atoms({"0", "1", "2", "3", "a", "b"}), 2, Ultrafilter(indices(2), 0));
}

// Every map P(X) -> P(I) for |X| = gx, |I| = gi, as value vectors.
template <typename F>
void each_map(int gx, int gi, F&& fn) {
  std::size_t cells = std::size_t(1) << gx;
  Mask radix = Mask(1) << gi;
  std::vector<Mask> p(cells, 0);
  while (true) {
    fn(p);
    std::size_t k = 0;
    while (k < cells && ++p[k] == radix) p[k++] = 0;
    if (k == cells) return;
  }
}

}  // namespace

TEST_CASE("concurrent relations") {
  auto fin = check_concurrent(finite_subset_relation(ent("{a,b}")));
  CHECK(fin.concurrent);
  REQUIRE(fin.bound);
  CHECK(*fin.bound == ent("{a,b}"));
  Entity a = Entity::atom("a"), b = Entity::atom("b");
  auto no = check_concurrent(Entity::set({oracle::pair(a, ent("{a}")), oracle::pair(b, ent("{b}"))}));
  CHECK_FALSE(no.concurrent);
  CHECK(no.blocking == std::optional<Entity>(ent("{a,b}")));
  CHECK(check_concurrent(Entity::empty_set()).concurrent);
  CHECK_THROWS_AS(check_concurrent(ent("{a}")), PreconditionError);
}

TEST_CASE("hyperfinite sets") {
  StarMapContext ctx = numbers_ctx();
  CHECK(number_prefix(ctx) == 4);
  auto h = is_hyperfinite(ctx, ctx.star(ent("{a,b}")));
  REQUIRE(h);
  CHECK(h->n == 2);
  Entity n0 = Entity::atom("0"), n1 = Entity::atom("1");
  CHECK(h->f == Entity::set({oracle::pair(n0, Entity::atom("a")), oracle::pair(n1, Entity::atom("b"))}));
  CHECK(h->psi);
  CHECK(ctx.star_unbounded(sets::power(h->certificate)).contains(ctx.star(ent("{a,b}"))));

  auto e = is_hyperfinite(ctx, Entity::empty_set());
  REQUIRE(e);
  CHECK(e->n == 0);
  CHECK(e->f == Entity::empty_set());
  CHECK_THROWS_AS(is_hyperfinite(ctx, ent("{{{a}}}")), PreconditionError);
  CHECK_THROWS_AS(is_hyperfinite(ctx, ent("{0,1,2,3}")), PreconditionError);
}

TEST_CASE("hyperfinite witnesses are bijections onto the set") {
  oracle::Rng rng(2);
  auto identity = [](Entity e) { return e; };
  EntityList base = atoms({"a", "b", "c"});
  for (int i = 0; i < 50; ++i) {
    Entity a = oracle::random_entity(rng, base, 2);
    if (!a.is_set() || a.size() > 6) continue;
    Hyperfinite h = hyperfinite_witness(a, 8, identity);
    CHECK(h.psi);
    CHECK(h.n == static_cast<int>(a.size()));
    // f pairs the numerals 0..n-1 with distinct members covering a.
    std::set<Entity> seen;
    for (Entity p : h.f.members()) {
      auto d = decode_pair(p);
      REQUIRE(d);
      int k = std::stoi(d->first.name());
      CHECK(k >= 0);
      CHECK(k < h.n);
      CHECK(a.contains(d->second));
      seen.insert(d->second);
    }
    CHECK(seen.size() == a.size());
    CHECK(static_cast<int>(h.f.size()) == h.n);
  }
}

TEST_CASE("enlargement check") {
  StarMapContext ctx(atoms({"a", "b"}), 2, Ultrafilter(indices(2), 0));
  CheckReport rep = enlargement_check(ctx, {ent("{{a,b},{a}}"), ent("{{a},{b}}"), ent("{{a}}")});
  CHECK(rep.passed());
  CHECK(rep.stats().at("checked") == 2);
  CHECK(rep.stats().at("without_fip") == 1);
}

TEST_CASE("enlargement pipeline") {
  EntityList x{Entity::atom("a")};
  Entity v1 = vn_entity(x, 1);
  EnlargementResult r = enlargement_pipeline(x, 1, v1);
  CHECK(r.fip);
  CHECK(r.principal_at_top);
  CHECK(r.a == v1);
  CHECK(sets::subset(r.sigma_b, r.a));
  CHECK(sets::subset(r.a, r.star_b));
  CHECK_MESSAGE(r.report.passed(), r.report.summary());
  CHECK(r.index.size() == 8);

  EnlargementResult empty = enlargement_pipeline(x, 1, Entity::empty_set());
  CHECK(empty.a == Entity::empty_set());
  CHECK(empty.report.passed());

  EnlargementResult dropped = enlargement_pipeline(x, 1, v1, true);
  CHECK_FALSE(dropped.report.passed());

  CHECK_THROWS_AS(enlargement_pipeline(x, 1, ent("{{{a}}}")), PreconditionError);
  CHECK_THROWS_AS(enlargement_pipeline(atoms({"a", "b", "c"}), 1, Entity::empty_set()), CapExceeded);
}

TEST_CASE("extending pointwise functions") {
  StarMapContext ctx(atoms({"a", "b"}), 2, Ultrafilter(indices(2), 1));
  Entity a = Entity::atom("a"), b = Entity::atom("b");
  Entity plus = extend_function(ctx, ent("{a}"), ent("{b}"), {{a, ctx.star(b)}});
  CHECK(plus == ctx.star_unbounded(Entity::set({oracle::pair(a, b)})));
  Entity g = Entity::set({oracle::pair(a, b), oracle::pair(b, a)});
  Entity sg = ctx.star_unbounded(g);
  std::map<Entity, Entity> restricted{{a, *sets::apply(sg, ctx.star(a))}, {b, *sets::apply(sg, ctx.star(b))}};
  CHECK(extend_function(ctx, ent("{a,b}"), ent("{a,b}"), restricted) == sg);
  CHECK(extend_function(ctx, Entity::empty_set(), ent("{a}"), {}) == Entity::empty_set());
  CHECK_THROWS_AS(extend_function(ctx, ent("{a}"), ent("{b}"), {{a, ent("{b}")}}), PreconditionError);
  CHECK_THROWS_AS(extend_function(ctx, ent("{a}"), ent("{b}"), {}), PreconditionError);
}

TEST_CASE("reversal law examples") {
  IndexSet i2 = indices(2);
  OrderReversal c = OrderReversal::constant(ground(2), i2, 0b11);
  CHECK(is_order_reversal(c).holds);
  CHECK(is_anti_additive(c).holds);
  CHECK(is_locally_finite(c).holds);
  OrderReversal p(ground(2), i2, {0b11, 0b11, 0b11, 0b01});
  CHECK(is_order_reversal(p).holds);
  LawVerdict aa = is_anti_additive(p);
  CHECK_FALSE(aa.holds);
  REQUIRE(aa.witness);
  CHECK(p.show_subset(aa.witness->first) == "{0}");
  CHECK(p.show_subset(aa.witness->second) == "{1}");
  OrderReversal bad(ground(2), i2, {0b11, 0b01, 0b11, 0b11});
  CHECK_FALSE(is_order_reversal(bad).holds);
  CHECK(is_locally_finite(bad).bound == std::vector<int>{2, 2});
  CHECK_THROWS_AS(OrderReversal(ground(2), i2, {0b11}), Error);
}

TEST_CASE("reversal laws match the table definitions") {
  for (int gx = 1; gx <= 2; ++gx)
    for (int gi = 1; gi <= 2; ++gi)
      each_map(gx, gi, [&](const std::vector<Mask>& p) {
        OrderReversal r(ground(gx), indices(gi), p);
        CHECK(is_order_reversal(r).holds == oracle::table_order_reversal(p));
        CHECK(is_anti_additive(r).holds == oracle::table_anti_additive(p));
      });
}

TEST_CASE("supports") {
  IndexSet i2 = indices(2);
  Support s = support_of(OrderReversal::constant(ground(3), i2, 0b11));
  for (const auto& phi : s.phi) CHECK(phi == std::optional<Mask>(0b111));
  CHECK(reversal_from_support(s, ground(3)).p == OrderReversal::constant(ground(3), i2, 0b11).p);
  try {
    support_of(OrderReversal(ground(2), i2, {0b11, 0b11, 0b11, 0b01}));
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    CHECK(e.witness().find("({0}, {1})") != std::string::npos);
  }
}

TEST_CASE("support round trips on every anti-additive reversal") {
  long long checked = 0;
  for (int gx = 1; gx <= 3; ++gx)
    for (int gi = 1; gi <= 3; ++gi)
      each_map(gx, gi, [&](const std::vector<Mask>& p) {
        if (!oracle::table_anti_additive(p)) return;
        ++checked;
        OrderReversal r(ground(gx), indices(gi), p);
        Support s = support_of(r);
        OrderReversal back = reversal_from_support(s, r.ground);
        if (back.p != p) CHECK_MESSAGE(false, "round trip differs");
        Support again = support_of(back);
        if (again.phi != s.phi) CHECK_MESSAGE(false, "support differs after round trip");
      });
  // p is fixed by p({}) and the singletons, each a subset of p({}): (1 + 2^|X|)^|I| maps.
  CHECK(checked == 39 + 155 + 819);
}

TEST_CASE("reversals induced by random supports") {
  oracle::Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    int gx = oracle::uniform(rng, 1, 4), gi = oracle::uniform(rng, 1, 4);
    Support s{indices(gi), {}};
    for (int i = 0; i < gi; ++i) s.phi.push_back(static_cast<Mask>(rng()) & ((Mask(1) << gx) - 1));
    OrderReversal p = reversal_from_support(s, ground(gx));
    REQUIRE(oracle::table_anti_additive(p.p));
    Support t = support_of(p);
    for (int i = 0; i < gi; ++i) {
      REQUIRE(t.phi[i]);
      CHECK((*t.phi[i] & *s.phi[i]) == *s.phi[i]);
    }
    CHECK(reversal_from_support(t, ground(gx)).p == p.p);
  }
}

TEST_CASE("localization") {
  IndexSet i2 = indices(2);
  OrderReversal c = OrderReversal::constant(ground(2), i2, 0b11);
  Localized l = localize(c, {0b11, 0b01, 0b00});
  CHECK(l.lp.at(0) == 0b11);
  CHECK(l.lp.at(0b01) == 0b01);
  CHECK(l.lp.at(0b10) == 0b01);
  CHECK(l.lp.at(0b11) == 0);
  CHECK(l.report.passed());
  CHECK(localize(c, {0b11, 0b11, 0b11}).lp.p == c.p);
  CHECK_THROWS_AS(localize(c, {0b11, 0b01, 0b10}), PreconditionError);
  CHECK_THROWS_AS(localize(c, {0b01, 0b01, 0b01}), PreconditionError);
  CHECK_THROWS_AS(localize(c, {0b11}), PreconditionError);
}

TEST_CASE("localization bounds on random inputs") {
  oracle::Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    int gx = oracle::uniform(rng, 1, 4), gi = oracle::uniform(rng, 1, 4);
    OrderReversal p = oracle::random_reversal(rng, gx, gi);
    std::vector<Mask> chain{p.index.full()};
    int len = oracle::uniform(rng, gx + 1, gx + 3);
    while (static_cast<int>(chain.size()) < len) chain.push_back(chain.back() & static_cast<Mask>(rng()));
    Localized l = localize(p, chain);
    CHECK(l.report.passed());
    for (Mask s = 0; s <= p.full_ground(); ++s) {
      CHECK((l.lp.at(s) & ~p.at(s)) == 0);
      for (int i = 0; i < gi; ++i) {
        if (!((l.lp.at(s) >> i) & 1u)) continue;
        int n = len;
        for (int k = 0; k < len; ++k)
          if (!((chain[k] >> i) & 1u)) {
            n = k;
            break;
          }
        CHECK(std::popcount(s) < n);
      }
    }
    CHECK(oracle::table_order_reversal(l.lp.p));
  }
}

TEST_CASE("monotone anti-additive reduction") {
  oracle::Rng rng(16);
  for (int trial = 0; trial < 200; ++trial) {
    OrderReversal p = oracle::random_reversal(rng, 4, oracle::uniform(rng, 1, 4));
    REQUIRE(oracle::table_order_reversal(p.p));
    OrderReversal q = monotone_antiadditive(p);
    CHECK(oracle::table_anti_additive(q.p));
    for (Mask s = 0; s <= p.full_ground(); ++s) CHECK((q.at(s) & ~p.at(s)) == 0);
  }
  OrderReversal c = OrderReversal::constant(ground(3), indices(2), 0b10);
  CHECK(monotone_antiadditive(c).p == c.p);
  // Prefix form: p(s) depends only on max s.
  OrderReversal prefix(ground(2), indices(2), {0b11, 0b11, 0b01, 0b01});
  CHECK(monotone_antiadditive(prefix).p == prefix.p);
  CHECK_THROWS_AS(monotone_antiadditive(OrderReversal({"1", "0"}, indices(1), {1, 1, 1, 1})),
                  PreconditionError);
}

TEST_CASE("supports satisfying both conditions are realized") {
  oracle::Rng rng(21);
  int realized = 0;
  for (int trial = 0; trial < 300; ++trial) {
    int gx = oracle::uniform(rng, 1, 3), gi = oracle::uniform(rng, 1, 3);
    SetSystem sys{ground(gx), indices(gi), {}, {}};
    for (int i = 0; i < gi; ++i) {
      int d = oracle::uniform(rng, 1, 4);
      sys.domain.push_back(d);
      std::vector<Mask> row;
      for (int t = 0; t < gx; ++t) row.push_back(static_cast<Mask>(rng()) & ((Mask(1) << d) - 1));
      sys.sets.push_back(row);
    }
    Support phi{sys.index, {}};
    for (int i = 0; i < gi; ++i) phi.phi.push_back(static_cast<Mask>(rng()) & ((Mask(1) << gx) - 1));
    Ultrafilter u(sys.index, oracle::uniform(rng, 0, gi - 1));

    // Conditions computed directly from the sets.
    bool cond = true;
    for (int i = 0; i < gi; ++i) {
      Mask meet = (Mask(1) << sys.domain[i]) - 1;
      for (int t = 0; t < gx; ++t)
        if ((*phi.phi[i] >> t) & 1u) meet &= sys.sets[i][t];
      if (!meet) cond = false;
    }
    for (int t = 0; t < gx; ++t)
      if (!((*phi.phi[u.point()] >> t) & 1u)) cond = false;

    Realization r = realize_support(sys, phi, u);
    CHECK(r.supported == cond);
    if (!cond) continue;
    ++realized;
    CHECK(r.report.passed());
    int i0 = u.point();
    for (int t = 0; t < gx; ++t) CHECK(((sys.sets[i0][t] >> r.choice[i0]) & 1u) == 1u);
  }
  CHECK(realized > 10);
}

TEST_CASE("finite saturation checkers agree") {
  StarMapContext ctx = numbers_ctx();
  oracle::Rng rng(27);
  EntityList base = atoms({"a", "b"});
  EntityList v1 = enumerate_vn(base, 1);
  for (int trial = 0; trial < 30; ++trial) {
    EntityList fam;
    for (Entity s : v1)
      if (s.is_set() && s.size() > 0 && oracle::uniform(rng, 0, 1)) fam.push_back(s);
    if (fam.empty()) continue;
    Entity family = Entity::set(fam);
    bool fip = sets::big_intersection(family).size() > 0;
    CheckReport e = enlargement_check(ctx, {family});
    CHECK(e.passed());
    if (fip) CHECK(e.stats().at("checked") == 1);
    // Membership restricted to the family is concurrent exactly with f.i.p.
    EntityList pairs;
    for (Entity s : fam)
      for (Entity m : s.members()) pairs.push_back(oracle::pair(m, s));
    auto conc = check_concurrent(Entity::set(pairs));
    Entity dom = sets::big_union(family);
    if (dom.size() > 0 && sets::big_intersection(family) == dom) CHECK(conc.concurrent);
    // Hyperfinite approximation of the union contains its sigma image.
    Entity u = sets::big_union(family);
    auto h = is_hyperfinite(ctx, ctx.star(u));
    REQUIRE(h);
    CHECK(sets::subset(ctx.sigma_image(u), ctx.star(u)));
    CHECK(h->n == static_cast<int>(u.size()));
  }
}
