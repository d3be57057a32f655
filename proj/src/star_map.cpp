#include "umt/star_map.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <unordered_map>

#include "umt/error.hpp"

namespace umt {

StarMapContext::StarMapContext(EntityList base, int rank_bound, Ultrafilter u, bool canonicalize,
                               std::size_t cap)
    : base_(canonical_list(std::move(base))),
      rank_bound_(rank_bound),
      u_(std::move(u)),
      canonicalize_(canonicalize) {
  if (base_.empty()) throw PreconditionError("base set must be nonempty");
  for (Entity a : base_)
    if (!a.is_atom()) throw PreconditionError("base set must consist of atoms", a.str());
  if (rank_bound_ < 1) throw PreconditionError("rank bound must be at least 1");
  least_atom_ = base_.front();
  if (cap == 0) cap = default_cap();
  for (int j = 0; j <= rank_bound_; ++j) {
    auto sz = vn_size(base_.size(), j);
    if (!sz || *sz > cap) break;
    levels_.push_back(enumerate_vn(base_, j, cap));
    level_ = j;
  }
  EntityList t = levels_.back();
  for (int j = 0; j < rank_bound_ && j <= level_; ++j) t.push_back(Entity::set(levels_[j]));
  tracked_ = canonical_list(std::move(t));
}

Entity StarMapContext::lift(Entity e) const {
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->map.find(e);
    if (it != cache_->map.end()) return it->second;
  }
  Entity out;
  if (e.is_atom()) {
    if (canonicalize_) {
      out = e;
    } else {
      // Representative of the class: e at the principal point, the least
      // base atom elsewhere.
      std::string name = "<";
      for (int i = 0; i < u_.index().size(); ++i) {
        if (i) name += "|";
        name += (i == u_.point() ? e : least_atom_).name();
      }
      out = Entity::atom(name + ">");
    }
  } else {
    EntityList m;
    m.reserve(e.size());
    for (Entity x : e.members()) m.push_back(lift(x));
    out = Entity::set(std::move(m));
  }
  std::lock_guard<std::mutex> lock(cache_->mutex);
  cache_->map.emplace(e, out);
  return out;
}

Entity StarMapContext::quotient(const PointwiseFunction& f, bool guard) const {
  if (static_cast<int>(f.size()) != u_.index().size())
    throw PreconditionError("function length differs from the index set");
  Entity v = f[u_.point()];
  if (!v.valid()) throw PreconditionError("undefined value at the principal point");
  if (guard && v.rank() > rank_bound_)
    throw PreconditionError("rank bound exceeded", v.str());
  // g in_U f iff g(i0) in f(i0), so f/U is determined by f(i0).
  return lift(v);
}

Entity StarMapContext::star_unbounded(Entity a) const {
  auto it = overrides_.find(a);
  if (it != overrides_.end()) return it->second;
  return lift(a);
}

Entity StarMapContext::star(Entity a) const {
  if (a.rank() > rank_bound_) throw PreconditionError("rank bound exceeded", a.str());
  return star_unbounded(a);
}

Entity StarMapContext::sigma_image(Entity a) const {
  EntityList m;
  for (Entity x : a.members()) m.push_back(star_unbounded(x));
  return Entity::set(std::move(m));
}

Entity StarMapContext::star_base() const { return star_unbounded(Entity::set(base_)); }

namespace {

std::vector<std::string> transfer_vars(int k) {
  static const char* names[] = {"x", "y", "z", "u", "v", "w", "s", "t"};
  if (k < 1 || k > 8) throw PreconditionError("transfer needs between 0 and 7 parameters");
  return std::vector<std::string>(names, names + k);
}

struct Domain {
  EntityList elems;
  std::unordered_map<Entity, int> index;
  std::vector<std::vector<int>> members;

  explicit Domain(EntityList roots) : elems(transitive_closure(roots)) {
    for (std::size_t i = 0; i < elems.size(); ++i) index[elems[i]] = static_cast<int>(i);
    members.resize(elems.size());
    for (std::size_t i = 0; i < elems.size(); ++i)
      for (Entity m : elems[i].members()) members[i].push_back(index.at(m));
  }
};

AtomFiller membership_filler(const FormulaTable& table, const Domain& dom) {
  return [&table, &dom](std::size_t atom, const AssignmentSpace& space, MaskTable& m, std::size_t row) {
    const Formula& f = table.atoms[atom];
    auto var_of = [&](const Term& t) {
      for (std::size_t i = 0; i < table.vars.size(); ++i)
        if (table.vars[i] == t.name) return static_cast<int>(i);
      throw Error("unknown variable in atom");
    };
    int a = var_of(f.terms()[0]), b = var_of(f.terms()[1]);
    bool mem = f.kind() == FKind::Mem;
    for (std::size_t s = 0; s < space.count; ++s) {
      int x = space.value(s, a), y = space.value(s, b);
      bool v = mem ? dom.elems[y].contains(dom.elems[x]) : x == y;
      if (v) m.set(row, s);
    }
  };
}

}  // namespace

CheckReport check_transfer(const StarMapContext& ctx, const TransferOptions& opt) {
  CheckReport rep("transfer");
  rep.set_seed(opt.seed);
  if (opt.max_params < 0) throw PreconditionError("negative parameter count");
  if (ctx.materialized_level() < ctx.rank_bound() - 1)
    throw CapExceeded("parameter pool V_" + std::to_string(ctx.rank_bound() - 1) +
                      " is not materializable");
  const EntityList& pool = ctx.level(ctx.rank_bound() - 1);
  EntityList images;
  for (Entity p : pool) images.push_back(ctx.star(p));

  Domain left(pool), right(images);
  EnumOptions eo;
  eo.max_depth = opt.depth;
  eo.vars = transfer_vars(opt.max_params + 1);
  eo.and_budget = opt.and_budget;
  eo.seed = opt.seed;
  FormulaTable table = enumerate_bounded_table(eo);

  MaskTable lm = evaluate_table(table, static_cast<int>(left.elems.size()), membership_filler(table, left),
                                &left.members);
  MaskTable rm = evaluate_table(table, static_cast<int>(right.elems.size()),
                                membership_filler(table, right), &right.members);
  AssignmentSpace ls(static_cast<int>(left.elems.size()), static_cast<int>(eo.vars.size()));
  AssignmentSpace rs(static_cast<int>(right.elems.size()), static_cast<int>(eo.vars.size()));

  std::vector<int> lidx, ridx;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    lidx.push_back(left.index.at(pool[i]));
    ridx.push_back(right.index.at(images[i]));
  }

  std::mt19937_64 rng(opt.seed);
  long long checks = 0, skipped = 0, checked_formulas = 0;
  bool any_sampled = false;
  const std::size_t P = pool.size();
  for (std::size_t f = 0; f < table.size(); ++f) {
    const EnumNode& node = table.nodes[f];
    int nfree = std::popcount(node.free);
    if (nfree > opt.max_params) {
      ++skipped;
      continue;
    }
    ++checked_formulas;
    std::vector<int> free_vars;
    for (int v = 0; v < static_cast<int>(eo.vars.size()); ++v)
      if ((node.free >> v) & 1u) free_vars.push_back(v);
    double space = std::pow(static_cast<double>(P), nfree);
    bool exhaustive = space <= static_cast<double>(opt.exhaustive_limit);
    std::size_t rounds = exhaustive ? static_cast<std::size_t>(space) : opt.exhaustive_limit;
    any_sampled = any_sampled || !exhaustive;
    std::vector<std::size_t> pick(free_vars.size(), 0);
    for (std::size_t r = 0; r < rounds; ++r) {
      if (exhaustive) {
        std::size_t code = r;
        for (auto& p : pick) {
          p = code % P;
          code /= P;
        }
      } else {
        for (auto& p : pick) p = rng() % P;
      }
      std::vector<int> lv(eo.vars.size(), 0), rv(eo.vars.size(), 0);
      for (std::size_t k = 0; k < free_vars.size(); ++k) {
        lv[free_vars[k]] = lidx[pick[k]];
        rv[free_vars[k]] = ridx[pick[k]];
      }
      ++checks;
      bool l = lm.get(f, ls.encode(lv));
      bool rr = rm.get(f, rs.encode(rv));
      if (l != rr) {
        Counterexample c;
        c.formula = to_string(table.formula(f));
        for (std::size_t k = 0; k < free_vars.size(); ++k)
          c.assignment.push_back({eo.vars[free_vars[k]], pool[pick[k]].str() + " -> " + images[pick[k]].str()});
        c.detail = std::string("holds in V(X): ") + (l ? "true" : "false") + ", of the images: " +
                   (rr ? "true" : "false");
        c.depth = node.depth;
        rep.add(std::move(c));
      }
    }
  }
  rep.set_stat("formulas", static_cast<long long>(table.size()));
  rep.set_stat("formulas_checked", checked_formulas);
  rep.set_stat("formulas_skipped", skipped);
  rep.set_stat("instances", checks);
  rep.set_stat("pool", static_cast<long long>(P));
  rep.set_stat("depth", opt.depth);
  if (table.sampled) {
    rep.note("top-level conjunctions sampled: " + std::to_string(table.top_and_kept) + " of " +
             std::to_string(table.top_and_total));
    rep.set_stat("and_sampled", static_cast<long long>(table.top_and_kept));
    rep.set_stat("and_total", static_cast<long long>(table.top_and_total));
  }
  if (any_sampled) rep.note("parameter tuples sampled above " + std::to_string(opt.exhaustive_limit));
  return rep;
}

std::string kind_name(Kind k) {
  switch (k) {
    case Kind::Standard: return "standard";
    case Kind::Internal: return "internal";
    case Kind::External: return "external";
  }
  return "?";
}

Classification classify(const StarMapContext& ctx, Entity v) {
  Classification c;
  for (Entity u : ctx.tracked()) {
    if (ctx.star_unbounded(u) == v) {
      c.kind = Kind::Standard;
      c.witness = u;
      c.detail = "image of " + u.str();
      return c;
    }
  }
  for (Entity a : ctx.tracked()) {
    if (!a.is_set()) continue;
    if (ctx.star_unbounded(a).contains(v)) {
      c.kind = Kind::Internal;
      c.witness = a;
      c.detail = "member of the image of " + a.str();
      return c;
    }
  }
  c.kind = Kind::External;
  c.detail = "not a member of the image of any of " + std::to_string(ctx.tracked().size()) +
             " tracked entities";
  return c;
}

namespace {

std::map<Entity, Entity> constant_map(const StarMapContext& ctx, const Formula& phi) {
  std::map<Entity, Entity> m;
  for (Entity e : entity_constants(phi)) m[e] = ctx.star(e);
  return m;
}

}  // namespace

ComprehensionResult star_comprehension(const StarMapContext& ctx, const Formula& phi,
                                       const std::string& var, Entity a, const Env& params) {
  if (!is_bounded(phi)) throw PreconditionError("formula is not bounded", to_string(phi));
  ComprehensionResult r;
  if (a.is_atom()) {
    r.star_of_set = r.set_of_star = Entity::empty_set();
    r.equal = true;
    return r;
  }
  Env env = params;
  EntityList chosen;
  for (Entity m : a.members()) {
    env[var] = m;
    if (eval_bounded(phi, env)) chosen.push_back(m);
  }
  r.star_of_set = ctx.star(Entity::set(chosen));

  Formula sphi = star_transform(phi, constant_map(ctx, phi));
  Env senv;
  for (const auto& [k, v] : params) senv[k] = ctx.star(v);
  EntityList right;
  for (Entity m : ctx.star(a).members()) {
    senv[var] = m;
    if (eval_bounded(sphi, senv)) right.push_back(m);
  }
  r.set_of_star = Entity::set(right);
  r.equal = r.star_of_set == r.set_of_star;
  return r;
}

InternalDefinition internal_definition(const StarMapContext& ctx, const Formula& phi,
                                       const std::string& var, Entity b, const Env& params) {
  if (!is_bounded(phi)) throw PreconditionError("formula is not bounded", to_string(phi));
  Classification cb = classify(ctx, b);
  if (cb.kind == Kind::External) throw PreconditionError("bounding set is external", b.str());
  for (const auto& [k, v] : params)
    if (classify(ctx, v).kind == Kind::External)
      throw PreconditionError("parameter '" + k + "' is external", v.str());
  InternalDefinition out;
  Env env = params;
  EntityList chosen;
  for (Entity m : b.members()) {
    env[var] = m;
    if (eval_bounded(phi, env)) chosen.push_back(m);
  }
  out.result = Entity::set(chosen);
  out.classification = classify(ctx, out.result);
  // result is a subset of *V_j(X), hence a member of *P(V_j(X)).
  for (int j = 0; j <= ctx.materialized_level(); ++j) {
    Entity image = ctx.star_unbounded(Entity::set(ctx.level(j)));
    if (sets::subset(out.result, image)) {
      out.witness = "*P(V_" + std::to_string(j) + "(X))";
      if (out.classification.kind == Kind::External) {
        out.classification.kind = Kind::Internal;
        out.classification.detail = "member of " + out.witness;
      }
      break;
    }
  }
  return out;
}

namespace {

struct Suite {
  const StarMapContext& ctx;
  std::mt19937_64 rng;
  CheckReport rep{"star-algebra"};

  Entity S(Entity e) const { return ctx.star_unbounded(e); }

  void law(const std::string& name, Entity lhs, Entity rhs, const std::string& on) {
    rep.count(name);
    if (lhs != rhs)
      rep.add(Counterexample{name, {{"on", on}}, lhs.str() + " != " + rhs.str(), -1});
  }
  void law(const std::string& name, bool ok, const std::string& on) {
    rep.count(name);
    if (!ok) rep.add(Counterexample{name, {{"on", on}}, "law fails", -1});
  }

  // Above the tracked ranks, v is standard when renaming its atoms back
  // through * gives a preimage u with *u = v.
  std::optional<Entity> preimage(Entity v) const {
    if (v.is_atom()) {
      for (Entity a : ctx.base())
        if (S(a) == v) return a;
      return std::nullopt;
    }
    EntityList m;
    for (Entity x : v.members()) {
      auto u = preimage(x);
      if (!u) return std::nullopt;
      m.push_back(*u);
    }
    Entity u = Entity::set(std::move(m));
    if (S(u) != v) return std::nullopt;
    return u;
  }

  bool internal(Entity v) const {
    if (classify(ctx, v).kind != Kind::External) return true;
    return v.rank() > ctx.rank_bound() && preimage(v).has_value();
  }

  Entity internal_only(Entity s) const {
    EntityList m;
    for (Entity x : s.members())
      if (internal(x)) m.push_back(x);
    return Entity::set(std::move(m));
  }

  EntityList sets_of(const EntityList& v, std::size_t max_size) const {
    EntityList out;
    for (Entity e : v)
      if (e.is_set() && e.size() <= max_size) out.push_back(e);
    return out;
  }

  std::vector<std::pair<Entity, Entity>> pairs(const EntityList& s, std::size_t limit) {
    std::vector<std::pair<Entity, Entity>> out;
    if (s.empty()) return out;
    if (s.size() * s.size() <= limit) {
      for (Entity a : s)
        for (Entity b : s) out.push_back({a, b});
    } else {
      for (std::size_t k = 0; k < limit; ++k) out.push_back({s[rng() % s.size()], s[rng() % s.size()]});
    }
    return out;
  }

  Entity random_subset(Entity s) {
    EntityList m;
    for (Entity x : s.members())
      if (rng() & 1u) m.push_back(x);
    return Entity::set(std::move(m));
  }
};

}  // namespace

CheckReport star_algebra_suite(const StarMapContext& ctx, std::uint64_t seed) {
  Suite s{ctx, std::mt19937_64(seed)};
  s.rep.set_seed(seed);
  int top = std::min(ctx.materialized_level(), ctx.rank_bound());
  const EntityList& vtop = ctx.level(top);
  const EntityList& vsmall = ctx.level(std::min(top, 1));

  s.law("empty", s.S(Entity::empty_set()), Entity::empty_set(), "{}");
  for (Entity a : ctx.base()) s.law("atoms_to_atoms", s.S(a).is_atom(), a.str());
  s.law("base_set", eval_bounded(build_base(), {{"x", ctx.star_base()}}), ctx.star_base().str());

  // Boolean operations and products.
  for (auto [a, b] : s.pairs(s.sets_of(vtop, 64), 4096)) {
    std::string on = a.str() + " " + b.str();
    s.law("union", s.S(sets::unite(a, b)), sets::unite(s.S(a), s.S(b)), on);
    s.law("intersection", s.S(sets::intersect(a, b)), sets::intersect(s.S(a), s.S(b)), on);
    s.law("difference", s.S(sets::minus(a, b)), sets::minus(s.S(a), s.S(b)), on);
    s.law("product", s.S(sets::product(a, b)), sets::product(s.S(a), s.S(b)), on);
    s.law("subset", sets::subset(a, b) == sets::subset(s.S(a), s.S(b)), on);
  }

  // Finite sets are the sets of images of their members; every tracked set
  // is finite, so no tracked image ever gains a nonstandard member.
  for (Entity a : ctx.tracked()) {
    if (!a.is_set()) continue;
    s.law("finite_set", s.S(a), ctx.sigma_image(a), a.str());
    s.law("rank", s.S(a).rank() == a.rank(), a.str());
    s.law("big_union", s.S(sets::big_union(a)), sets::big_union(s.S(a)), a.str());
  }

  // Relations over small sets.
  EntityList small_sets = s.sets_of(vsmall, 8);
  for (auto [a, b] : s.pairs(small_sets, 1024)) {
    Entity ab = sets::product(a, b);
    EntityList rels;
    if (ab.size() <= 4) {
      rels = sets::power(ab).members();
    } else {
      for (int k = 0; k < 4; ++k) rels.push_back(s.random_subset(ab));
    }
    for (Entity r : rels) {
      std::string on = r.str();
      s.law("domain", s.S(sets::domain(r)), sets::domain(s.S(r)), on);
      s.law("range", s.S(sets::range(r)), sets::range(s.S(r)), on);
      s.law("inverse", s.S(sets::inverse(r)), sets::inverse(s.S(r)), on);
      Entity q = sets::inverse(s.random_subset(ab));
      s.law("composition", s.S(sets::compose(r, q)), sets::compose(s.S(r), s.S(q)), on + " ; " + q.str());
      Entity c = s.random_subset(a);
      s.law("image", s.S(sets::image(r, c)), sets::image(s.S(r), s.S(c)), on + " [" + c.str() + "]");
    }
  }

  // Functions, their values and power-type sets.
  for (auto [a, b] : s.pairs(small_sets, 1024)) {
    if (a.size() > 4 || b.size() > 4) continue;
    if (std::pow(static_cast<double>(b.size()), static_cast<double>(a.size())) > 64) continue;
    Entity space = sets::function_space(a, b);
    std::string on = a.str() + " " + b.str();
    s.law("function_space", s.S(space), s.internal_only(sets::function_space(s.S(a), s.S(b))), on);
    for (Entity f : space.members()) {
      Entity sf = s.S(f);
      s.law("function", sets::is_function_between(sf, s.S(a), s.S(b)), f.str());
      for (Entity x : a.members())
        s.law("value", *sets::apply(sf, s.S(x)), s.S(*sets::apply(f, x)), f.str() + " at " + x.str());
      s.law("injective", sets::is_injective(f) == sets::is_injective(sf), f.str());
      s.law("surjective", sets::is_surjective(f, b) == sets::is_surjective(sf, s.S(b)), f.str());
    }
  }
  for (Entity a : small_sets)
    if (a.size() <= 6)
      s.law("power_set", s.S(sets::power(a)), s.internal_only(sets::power(s.S(a))), a.str());

  // Indexed products over index sets of at most two elements.
  for (Entity idx : small_sets) {
    if (idx.size() > 2) continue;
    for (int k = 0; k < 16; ++k) {
      EntityList fam;
      for (Entity i : idx.members()) fam.push_back(kuratowski(i, small_sets[s.rng() % small_sets.size()]));
      Entity family = Entity::set(fam);
      s.law("indexed_product", s.S(sets::indexed_product(family)),
            s.internal_only(sets::indexed_product(s.S(family))), family.str());
    }
  }

  // Levels: the image of V_n(X) is the internal part of V_n(*X).
  EntityList star_atoms = ctx.star_base().members();
  for (int n = 0; n <= std::min(2, ctx.materialized_level()); ++n) {
    auto sz = vn_size(star_atoms.size(), n);
    if (!sz || *sz > default_cap()) break;
    Entity lhs = s.S(Entity::set(ctx.level(n)));
    Entity rhs = s.internal_only(Entity::set(enumerate_vn(star_atoms, n)));
    s.law("levels", lhs, rhs, "V_" + std::to_string(n));
  }

  // Quotient laws for random pointwise functions.
  const EntityList& pool = ctx.level(std::max(0, std::min(top, ctx.rank_bound() - 1)));
  const Ultrafilter& u = ctx.ultrafilter();
  int isz = ctx.index().size();
  for (int k = 0; k < 500; ++k) {
    PointwiseFunction f(isz), g(isz);
    for (int i = 0; i < isz; ++i) {
      f[i] = pool[s.rng() % pool.size()];
      g[i] = (s.rng() % 4 == 0) ? f[i] : pool[s.rng() % pool.size()];
    }
    Mask in = 0, eq = 0;
    for (int i = 0; i < isz; ++i) {
      if (f[i].contains(g[i])) in |= Mask(1) << i;
      if (f[i] == g[i]) eq |= Mask(1) << i;
    }
    Entity qf = ctx.quotient(f), qg = ctx.quotient(g);
    std::string on = f[u.point()].str() + " / " + g[u.point()].str();
    s.law("quotient_membership", u.contains(in) == qf.contains(qg), on);
    s.law("quotient_equality", u.contains(eq) == (qf == qg), on);
  }
  return s.rep;
}

std::vector<std::string> corruption_names() {
  return {"swap-singletons", "drop-member", "empty-to-singleton", "swap-atoms", "rank-bump"};
}

void apply_corruption(StarMapContext& ctx, const std::string& name) {
  const EntityList& x = ctx.base();
  if (x.size() < 2) throw PreconditionError("corruptions need at least two base atoms");
  Entity a = x[0], b = x[1];
  Entity sa = Entity::set({a}), sb = Entity::set({b});
  if (name == "swap-singletons") {
    Entity ia = ctx.star(sa), ib = ctx.star(sb);
    ctx.override_star(sa, ib);
    ctx.override_star(sb, ia);
  } else if (name == "drop-member") {
    Entity ab = Entity::set({a, b});
    ctx.override_star(ab, Entity::set({ctx.star(b)}));
  } else if (name == "empty-to-singleton") {
    ctx.override_star(Entity::empty_set(), Entity::set({Entity::empty_set()}));
  } else if (name == "swap-atoms") {
    Entity ia = ctx.star(a), ib = ctx.star(b);
    ctx.override_star(a, ib);
    ctx.override_star(b, ia);
  } else if (name == "rank-bump") {
    ctx.override_star(sa, Entity::set({ctx.star(sa)}));
  } else {
    throw Error("unknown corruption '" + name + "'");
  }
}

}  // namespace umt
