#include "umt/superstructure.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#include "umt/error.hpp"

namespace umt {

namespace sets {

namespace {
void need_set(Entity e, const char* what) {
  if (!e.is_set()) throw Error(std::string(what) + ": expected a set, got atom " + e.str());
}

std::vector<std::pair<Entity, Entity>> pairs_of(Entity r) {
  need_set(r, "relation");
  std::vector<std::pair<Entity, Entity>> out;
  for (Entity m : r.members()) {
    auto p = decode_pair(m);
    if (!p) throw Error("not an ordered pair: " + m.str());
    out.push_back(*p);
  }
  return out;
}
}  // namespace

Entity unite(Entity a, Entity b) {
  need_set(a, "union");
  need_set(b, "union");
  EntityList m = a.members();
  m.insert(m.end(), b.members().begin(), b.members().end());
  return Entity::set(std::move(m));
}

Entity intersect(Entity a, Entity b) {
  need_set(a, "intersection");
  need_set(b, "intersection");
  EntityList m;
  for (Entity x : a.members())
    if (b.contains(x)) m.push_back(x);
  return Entity::set(std::move(m));
}

Entity minus(Entity a, Entity b) {
  need_set(a, "difference");
  need_set(b, "difference");
  EntityList m;
  for (Entity x : a.members())
    if (!b.contains(x)) m.push_back(x);
  return Entity::set(std::move(m));
}

Entity product(Entity a, Entity b) {
  need_set(a, "product");
  need_set(b, "product");
  EntityList m;
  for (Entity x : a.members())
    for (Entity y : b.members()) m.push_back(kuratowski(x, y));
  return Entity::set(std::move(m));
}

Entity power(Entity a) {
  need_set(a, "power set");
  std::size_t n = a.size();
  if (n > 20) throw CapExceeded("power set of more than 20 elements");
  EntityList out;
  out.reserve(std::size_t(1) << n);
  for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
    EntityList s;
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1u) s.push_back(a.members()[i]);
    out.push_back(Entity::set(std::move(s)));
  }
  return Entity::set(std::move(out));
}

Entity big_union(Entity a) {
  need_set(a, "union");
  EntityList m;
  for (Entity s : a.members())
    if (s.is_set()) m.insert(m.end(), s.members().begin(), s.members().end());
  return Entity::set(std::move(m));
}

Entity big_intersection(Entity a) {
  need_set(a, "intersection");
  if (a.members().empty()) throw PreconditionError("intersection of an empty family");
  Entity acc = a.members().front();
  for (Entity s : a.members()) acc = intersect(acc, s);
  return acc;
}

bool subset(Entity a, Entity b) {
  if (!a.is_set() || !b.is_set()) return false;
  for (Entity x : a.members())
    if (!b.contains(x)) return false;
  return true;
}

bool is_relation(Entity r) {
  if (!r.is_set()) return false;
  for (Entity m : r.members())
    if (!decode_pair(m)) return false;
  return true;
}

Entity domain(Entity r) {
  EntityList m;
  for (auto& [x, y] : pairs_of(r)) m.push_back(x);
  return Entity::set(std::move(m));
}

Entity range(Entity r) {
  EntityList m;
  for (auto& [x, y] : pairs_of(r)) m.push_back(y);
  return Entity::set(std::move(m));
}

Entity inverse(Entity r) {
  EntityList m;
  for (auto& [x, y] : pairs_of(r)) m.push_back(kuratowski(y, x));
  return Entity::set(std::move(m));
}

Entity compose(Entity r, Entity s) {
  auto rp = pairs_of(r);
  auto sp = pairs_of(s);
  EntityList m;
  for (auto& [x, y] : rp)
    for (auto& [y2, z] : sp)
      if (y == y2) m.push_back(kuratowski(x, z));
  return Entity::set(std::move(m));
}

Entity image(Entity r, Entity c) {
  need_set(c, "image");
  EntityList m;
  for (auto& [x, y] : pairs_of(r))
    if (c.contains(x)) m.push_back(y);
  return Entity::set(std::move(m));
}

Entity preimage(Entity r, Entity c) {
  need_set(c, "preimage");
  EntityList m;
  for (auto& [x, y] : pairs_of(r))
    if (c.contains(y)) m.push_back(x);
  return Entity::set(std::move(m));
}

bool is_function(Entity f) {
  if (!is_relation(f)) return false;
  auto ps = pairs_of(f);
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (ps[i].first == ps[j].first && ps[i].second != ps[j].second) return false;
  return true;
}

bool is_function_between(Entity f, Entity a, Entity b) {
  if (!a.is_set() || !b.is_set() || !is_function(f)) return false;
  if (domain(f) != a) return false;
  return subset(range(f), b);
}

std::optional<Entity> apply(Entity f, Entity x) {
  for (auto& [u, v] : pairs_of(f))
    if (u == x) return v;
  return std::nullopt;
}

bool is_injective(Entity f) {
  auto ps = pairs_of(f);
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (ps[i].second == ps[j].second && ps[i].first != ps[j].first) return false;
  return true;
}

bool is_surjective(Entity f, Entity b) { return range(f) == b; }

Entity function_space(Entity a, Entity b) {
  need_set(a, "function space");
  need_set(b, "function space");
  std::size_t na = a.size(), nb = b.size();
  double count = 1;
  for (std::size_t i = 0; i < na; ++i) count *= static_cast<double>(nb);
  if (count > (1 << 20)) throw CapExceeded("function space too large");
  EntityList out;
  if (nb == 0 && na > 0) return Entity::set({});
  std::vector<std::size_t> idx(na, 0);
  while (true) {
    EntityList graph;
    for (std::size_t i = 0; i < na; ++i) graph.push_back(kuratowski(a.members()[i], b.members()[idx[i]]));
    out.push_back(Entity::set(std::move(graph)));
    std::size_t p = 0;
    while (p < na && ++idx[p] == nb) idx[p++] = 0;
    if (p == na) break;
  }
  return Entity::set(std::move(out));
}

Entity indexed_product(Entity family) {
  if (!is_function(family)) throw PreconditionError("indexed family must be a function");
  auto ps = pairs_of(family);
  double count = 1;
  for (auto& [i, s] : ps) {
    need_set(s, "indexed product");
    count *= static_cast<double>(s.size());
  }
  if (count > (1 << 20)) throw CapExceeded("product too large");
  if (count == 0) return Entity::set({});
  std::vector<std::size_t> idx(ps.size(), 0);
  EntityList out;
  while (true) {
    EntityList graph;
    for (std::size_t k = 0; k < ps.size(); ++k)
      graph.push_back(kuratowski(ps[k].first, ps[k].second.members()[idx[k]]));
    out.push_back(Entity::set(std::move(graph)));
    std::size_t p = 0;
    while (p < ps.size() && ++idx[p] == ps[p].second.size()) idx[p++] = 0;
    if (p == ps.size()) break;
  }
  return Entity::set(std::move(out));
}

Entity of_atoms(const std::vector<std::string>& names) {
  EntityList m;
  for (const auto& n : names) m.push_back(Entity::atom(n));
  return Entity::set(std::move(m));
}

}  // namespace sets

std::size_t default_cap() {
  if (const char* env = std::getenv("UMT_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return 1000000;
}

std::optional<std::size_t> vn_size(std::size_t base, int n) {
  std::size_t v = base;
  for (int i = 0; i < n; ++i) {
    if (v >= 63) return std::nullopt;
    std::size_t p = std::size_t(1) << v;
    v = base + p;
  }
  return v;
}

EntityList enumerate_vn(const EntityList& base, int n, std::size_t cap) {
  if (cap == 0) cap = default_cap();
  if (n < 0) throw Error("level must be non-negative");
  for (Entity a : base)
    if (!a.is_atom()) throw Error("base must consist of atoms");
  EntityList x = canonical_list(base);
  auto predicted = vn_size(x.size(), n);
  if (!predicted || *predicted > cap)
    throw CapExceeded("V_" + std::to_string(n) + " exceeds the cap of " + std::to_string(cap) +
                      " entities");
  EntityList level = x;
  for (int k = 0; k < n; ++k) {
    std::size_t m = level.size();
    EntityList next = x;
    next.reserve(x.size() + (std::size_t(1) << m));
    for (std::size_t mask = 0; mask < (std::size_t(1) << m); ++mask) {
      EntityList s;
      for (std::size_t i = 0; i < m; ++i)
        if ((mask >> i) & 1u) s.push_back(level[i]);
      next.push_back(Entity::set(std::move(s)));
    }
    level = canonical_list(std::move(next));
  }
  return level;
}

Entity vn_entity(const EntityList& base, int n, std::size_t cap) {
  return Entity::set(enumerate_vn(base, n, cap));
}

namespace {

struct Scope {
  std::vector<std::pair<const std::string*, Entity>> stack;

  Entity lookup(const std::string& v) const {
    for (auto it = stack.rbegin(); it != stack.rend(); ++it)
      if (*it->first == v) return it->second;
    throw Error("unbound variable '" + v + "'");
  }
};

Entity value_of(const Term& t, const Scope& sc) {
  switch (t.kind) {
    case Term::Kind::Var:
      return sc.lookup(t.name);
    case Term::Kind::Entity:
      return t.entity;
    default:
      throw Error("function symbols are not part of the membership language: " + to_string(t));
  }
}

bool eval(const Formula& f, Scope& sc) {
  switch (f.kind()) {
    case FKind::Eq:
      return value_of(f.terms()[0], sc) == value_of(f.terms()[1], sc);
    case FKind::Mem:
      return value_of(f.terms()[1], sc).contains(value_of(f.terms()[0], sc));
    case FKind::Rel:
      throw Error("relation symbol '" + f.symbol() + "' in a membership formula");
    case FKind::Not:
      return !eval(f.left(), sc);
    case FKind::And:
      return eval(f.left(), sc) && eval(f.right(), sc);
    case FKind::Or:
      return eval(f.left(), sc) || eval(f.right(), sc);
    case FKind::Implies:
      return !eval(f.left(), sc) || eval(f.right(), sc);
    case FKind::Iff:
      return eval(f.left(), sc) == eval(f.right(), sc);
    case FKind::Forall:
    case FKind::Exists:
      throw Error("unbounded quantifier over '" + f.symbol() + "'");
    case FKind::BForall:
    case FKind::BExists: {
      bool universal = f.kind() == FKind::BForall;
      Entity b = value_of(f.bound(), sc);
      // An atom has no members, so the quantifier ranges over nothing.
      bool result = universal;
      sc.stack.emplace_back(&f.symbol(), Entity());
      for (Entity m : b.members()) {
        sc.stack.back().second = m;
        bool v = eval(f.left(), sc);
        if (v != universal) {
          result = v;
          break;
        }
      }
      sc.stack.pop_back();
      return result;
    }
  }
  return false;
}

}  // namespace

bool eval_bounded(const Formula& f, const Env& env) {
  Scope sc;
  for (const auto& [k, v] : env) sc.stack.emplace_back(&k, v);
  return eval(f, sc);
}

bool is_transitive(Entity e) {
  if (!e.is_set()) return false;
  for (Entity m : e.members())
    for (Entity x : m.members())
      if (!e.contains(x)) return false;
  return true;
}

bool is_supertransitive(Entity t) {
  if (!is_transitive(t)) return false;
  for (Entity a : t.members()) {
    if (!a.is_set()) continue;
    if (a.size() > 20) throw CapExceeded("member too large for a power set check");
    for (Entity s : sets::power(a).members())
      if (!t.contains(s)) return false;
  }
  return true;
}

Entity build_supertransitive(Entity s) {
  if (!is_transitive(s)) throw PreconditionError("set is not transitive", s.str());
  return sets::unite(s, sets::power(s));
}

EntityList transitive_closure(const EntityList& roots) {
  std::set<Entity> seen;
  std::vector<Entity> todo(roots.begin(), roots.end());
  while (!todo.empty()) {
    Entity e = todo.back();
    todo.pop_back();
    if (!seen.insert(e).second) continue;
    for (Entity m : e.members()) todo.push_back(m);
  }
  return EntityList(seen.begin(), seen.end());
}

Entity encode_structure(const Structure& s, const std::map<std::string, Entity>& element_map) {
  if (!s.language().functions.empty())
    throw PreconditionError("encoding supports relational languages only");
  EntityList universe;
  std::vector<Entity> img(s.size());
  for (int i = 0; i < s.size(); ++i) {
    auto it = element_map.find(s.element(i));
    if (it == element_map.end()) throw PreconditionError("unmapped element", s.element(i));
    img[i] = it->second;
    universe.push_back(it->second);
  }
  if (canonical_list(universe).size() != universe.size())
    throw PreconditionError("element map is not injective");
  EntityList parts{Entity::set(universe)};
  for (const auto& [r, ar] : s.language().relations) {
    EntityList entries;
    for (const auto& t : s.tuples(r)) {
      EntityList comps;
      for (int x : t) comps.push_back(img[x]);
      entries.push_back(ar == 0 ? Entity::set({}) : tuple(comps));
    }
    parts.push_back(Entity::set(std::move(entries)));
  }
  return tuple(parts);
}

namespace {

class BarTranslator {
 public:
  BarTranslator(const Language& lang, FreshNames& fresh, std::string z, std::string t)
      : fresh_(fresh), z_(std::move(z)), t_(std::move(t)) {
    for (const auto& [r, ar] : lang.relations) rel_index_[r] = static_cast<int>(rel_index_.size()) + 1;
    width_ = static_cast<int>(lang.relations.size()) + 1;
  }

  Formula run(const Formula& f) {
    using F = Formula;
    switch (f.kind()) {
      case FKind::Eq:
        check_vars(f);
        return f;
      case FKind::Rel: {
        check_vars(f);
        int j = rel_index_.at(f.symbol());
        return with_components([&](const std::vector<Term>& c) {
          std::string w = fresh_.next("w");
          return F::bexists(w, c[j], defs::tuple(Term::var(w), f.terms(), fresh_));
        });
      }
      case FKind::Mem:
        throw Error("membership atom in a relational formula");
      case FKind::Not:
        return F::neg(run(f.left()));
      case FKind::And:
        return F::conj(run(f.left()), run(f.right()));
      case FKind::Or:
        return F::disj(run(f.left()), run(f.right()));
      case FKind::Implies:
        return F::implies(run(f.left()), run(f.right()));
      case FKind::Iff:
        return F::iff(run(f.left()), run(f.right()));
      case FKind::Forall:
      case FKind::Exists: {
        bool universal = f.kind() == FKind::Forall;
        Formula body = run(f.left());
        return with_components([&](const std::vector<Term>& c) {
          return universal ? F::bforall(f.symbol(), c[0], body)
                           : F::bexists(f.symbol(), c[0], body);
        });
      }
      case FKind::BForall:
      case FKind::BExists:
        throw Error("bounded quantifier in a relational formula");
    }
    return f;
  }

 private:
  void check_vars(const Formula& f) const {
    for (const Term& t : f.terms())
      if (t.kind != Term::Kind::Var) throw PreconditionError("only variables may appear in atoms", to_string(t));
  }

  // exists c0..ck in t (z = (c0,...,ck) and body(c)); the decomposition of z
  // is unique, so this also expresses universal statements about it.
  Formula with_components(const std::function<Formula(const std::vector<Term>&)>& body) {
    std::vector<std::string> names;
    std::vector<Term> comps;
    for (int i = 0; i < width_; ++i) {
      names.push_back(fresh_.next("c"));
      comps.push_back(Term::var(names.back()));
    }
    Formula inner = Formula::conj(defs::tuple(Term::var(z_), comps, fresh_), body(comps));
    for (int i = width_ - 1; i >= 0; --i) inner = Formula::bexists(names[i], Term::var(t_), inner);
    return inner;
  }

  FreshNames& fresh_;
  std::string z_, t_;
  std::map<std::string, int> rel_index_;
  int width_ = 1;
};

}  // namespace

BarFormula bar_formula(const Formula& phi, const Language& lang) {
  lang.validate();
  if (!lang.functions.empty()) throw PreconditionError("translation supports relational languages only");
  FreshNames fresh(all_variables(phi));
  std::string z = fresh.next("z");
  std::string t = fresh.next("t");
  BarTranslator tr(lang, fresh, z, t);
  return BarFormula{tr.run(phi), z, t};
}

}  // namespace umt

namespace umt {

EntityList atoms_of(Entity e) {
  EntityList out;
  for (Entity x : transitive_closure({e}))
    if (x.is_atom()) out.push_back(x);
  return out;
}

int rank_over(Entity e, const EntityList& base) {
  EntityList b = canonical_list(base);
  for (Entity a : atoms_of(e))
    if (!std::binary_search(b.begin(), b.end(), a))
      throw PreconditionError("atom outside the base set", a.str());
  return e.rank();
}

bool in_level(Entity e, const EntityList& base, int k) {
  EntityList b = canonical_list(base);
  for (Entity a : atoms_of(e))
    if (!std::binary_search(b.begin(), b.end(), a)) return false;
  return e.rank() <= k;
}

}  // namespace umt
