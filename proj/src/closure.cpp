#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "umt/error.hpp"
#include "umt/superstructure.hpp"

namespace umt {

namespace {

struct ClosureRun {
  EntityList base;
  EntityList v;
  EntityList set_members;
  int n;
  std::mt19937_64 rng;
  CheckReport rep;

  bool level_ok(Entity e, int k) { return in_level(e, base, k); }

  void expect(const std::string& item, Entity e, int k, const std::string& from) {
    rep.count(item);
    if (!level_ok(e, k))
      rep.add(Counterexample{item, {{"from", from}, {"object", e.str()}},
                             "not in V_" + std::to_string(k) + " (rank " + std::to_string(e.rank()) + ")",
                             -1});
  }

  Entity pick_set() { return set_members[rng() % set_members.size()]; }
  Entity pick() { return v[rng() % v.size()]; }

  Entity random_subset(Entity s) {
    EntityList m;
    for (Entity x : s.members())
      if (rng() & 1u) m.push_back(x);
    return Entity::set(std::move(m));
  }

  std::size_t power_count(std::size_t b, std::size_t a) {
    double c = std::pow(static_cast<double>(b), static_cast<double>(a));
    return c > 1e9 ? std::size_t(1e9) : static_cast<std::size_t>(c);
  }

  // All maps A -> B when there are at most `limit`, else `samples` random ones.
  EntityList maps(Entity a, Entity b, std::size_t limit, int samples) {
    if (b.size() == 0) return a.size() == 0 ? EntityList{Entity::empty_set()} : EntityList{};
    if (power_count(b.size(), a.size()) <= limit) return sets::function_space(a, b).members();
    EntityList out;
    for (int s = 0; s < samples; ++s) {
      EntityList g;
      for (Entity x : a.members()) g.push_back(kuratowski(x, b.members()[rng() % b.size()]));
      out.push_back(Entity::set(std::move(g)));
    }
    return out;
  }
};

}  // namespace

CheckReport check_closure_properties(const EntityList& base, int n, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("closure check needs n >= 1");
  ClosureRun r{canonical_list(base), enumerate_vn(base, n), {}, n, std::mt19937_64(seed),
               CheckReport("closure")};
  r.rep.set_seed(seed);
  for (Entity e : r.v)
    if (e.is_set()) r.set_members.push_back(e);
  const EntityList& v = r.v;
  const EntityList& sv = r.set_members;

  // 1. singletons, one level up.
  for (Entity a : v) r.expect("item01_singleton", Entity::set({a}), n + 1, a.str());

  // 2. finite unions stay at level n: all pairs, sampled triples.
  for (Entity a : sv)
    for (Entity b : sv) r.expect("item02_union", sets::unite(a, b), n, a.str() + " " + b.str());
  for (int s = 0; s < 500; ++s) {
    Entity a = r.pick_set(), b = r.pick_set(), c = r.pick_set();
    r.expect("item02_union", sets::unite(sets::unite(a, b), c), n, a.str() + " " + b.str() + " " + c.str());
  }

  // 3. finite subsets of V_n land in V_{n+1}.
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i; j < v.size(); ++j)
      r.expect("item03_finite_subset", Entity::set({v[i], v[j]}), n + 1, v[i].str() + " " + v[j].str());
  for (int s = 0; s < 500; ++s) {
    EntityList m;
    int k = 3 + static_cast<int>(r.rng() % 4);
    for (int t = 0; t < k; ++t) m.push_back(r.pick());
    Entity e = Entity::set(m);
    r.expect("item03_finite_subset", e, n + 1, e.str());
  }

  // 4. subsets of members, exhaustive.
  for (Entity b : sv)
    for (Entity a : sets::power(b).members()) r.expect("item04_subset", a, n, b.str());

  // 5. unions of subfamilies of a member.
  for (Entity b : sv) {
    EntityList fam;
    for (Entity m : b.members())
      if (m.is_set()) fam.push_back(m);
    for (Entity sub : sets::power(Entity::set(fam)).members())
      r.expect("item05_indexed_union", sets::big_union(sub), n, b.str() + " / " + sub.str());
  }

  // 6. union of a member.
  for (Entity b : sv) r.expect("item06_big_union", sets::big_union(b), n, b.str());

  // 7. intersections of nonempty families of sets from V_n.
  for (Entity a : sv)
    for (Entity b : sv) r.expect("item07_intersection", sets::intersect(a, b), n, a.str() + " " + b.str());
  for (int s = 0; s < 500; ++s) {
    int k = 3 + static_cast<int>(r.rng() % 3);
    Entity acc = r.pick_set();
    std::string from = acc.str();
    for (int t = 1; t < k; ++t) {
      Entity x = r.pick_set();
      acc = sets::intersect(acc, x);
      from += " " + x.str();
    }
    r.expect("item07_intersection", acc, n, from);
  }

  // 8. pairs two levels up, triples four.
  for (Entity a : v)
    for (Entity b : v) r.expect("item08_tuple", kuratowski(a, b), n + 2, a.str() + " " + b.str());
  for (int s = 0; s < 500; ++s) {
    Entity a = r.pick(), b = r.pick(), c = r.pick();
    r.expect("item08_tuple", tuple({a, b, c}), n + 4, a.str() + " " + b.str() + " " + c.str());
  }

  // 9 and 10. relations between members and their derived sets.
  std::vector<std::pair<Entity, std::pair<Entity, Entity>>> relations;
  for (Entity a : sv)
    for (Entity b : sv) {
      Entity ab = sets::product(a, b);
      EntityList rs{Entity::empty_set(), ab};
      if (ab.size() <= 4) {
        rs = sets::power(ab).members();
      } else {
        rs.push_back(r.random_subset(ab));
      }
      for (Entity rel : rs) relations.push_back({rel, {a, b}});
    }
  for (auto& [rel, ab] : relations) {
    std::string from = ab.first.str() + " x " + ab.second.str();
    r.expect("item09_relation", rel, n + 2, from);
    r.expect("item10_domain", sets::domain(rel), n, rel.str());
    r.expect("item10_range", sets::range(rel), n, rel.str());
    r.expect("item10_inverse", sets::inverse(rel), n + 2, rel.str());
    Entity c = r.random_subset(sets::domain(rel));
    r.expect("item10_image", sets::image(rel, c), n, rel.str() + " [" + c.str() + "]");
  }
  r.rep.set_stat("relations", static_cast<long long>(relations.size()));

  // 11. functions between members, with images and preimages.
  for (Entity a : sv)
    for (Entity b : sv)
      for (Entity f : r.maps(a, b, 64, 2)) {
        if (!sets::is_function_between(f, a, b)) {
          r.rep.fail("item11_function", "constructed map is not a function " + f.str());
          continue;
        }
        r.expect("item11_function", f, n + 2, a.str() + " -> " + b.str());
        Entity a2 = r.random_subset(a), b2 = r.random_subset(b);
        r.expect("item11_image", sets::image(f, a2), n, f.str());
        r.expect("item11_preimage", sets::preimage(f, b2), n, f.str());
      }

  // 12. function spaces three levels up.
  for (Entity a : sv)
    for (Entity b : sv)
      if (r.power_count(b.size(), a.size()) <= 256)
        r.expect("item12_function_space", sets::function_space(a, b), n + 3, a.str() + " " + b.str());
  {
    Entity a = Entity::atom(r.base.front().name());
    Entity b = Entity::atom(r.base.back().name());
    Entity space = sets::function_space(Entity::set({a}), Entity::set({b}));
    Entity expected = Entity::set({Entity::set({kuratowski(a, b)})});
    if (space != expected) r.rep.fail("item12_function_space", "B^A for singletons is " + space.str());
    r.expect("item12_function_space", space, n + 3, "{" + a.str() + "} {" + b.str() + "}");
  }

  // 13. products of indexed families of members over a small index set.
  for (Entity idx : sv) {
    if (idx.size() > 2) continue;
    for (int s = 0; s < 40; ++s) {
      EntityList fam;
      double count = 1;
      for (Entity i : idx.members()) {
        Entity ai = r.pick_set();
        count *= static_cast<double>(ai.size());
        fam.push_back(kuratowski(i, ai));
      }
      if (count > 4096) continue;
      Entity family = Entity::set(fam);
      Entity prod = sets::indexed_product(family);
      r.expect("item13_product", prod, n + 3, family.str());
    }
  }

  int items = 0;
  for (const auto& [k, c] : r.rep.stats())
    if (k.rfind("item", 0) == 0) ++items;
  r.rep.set_stat("v_size", static_cast<long long>(v.size()));
  r.rep.note("checked " + std::to_string(items) + " constructions over V_" + std::to_string(n));
  return r.rep;
}

}  // namespace umt
