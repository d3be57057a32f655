#include "umt/saturation.hpp"

#include <algorithm>
#include <bit>

#include "umt/error.hpp"
#include "umt/logic.hpp"
#include "umt/superstructure.hpp"

namespace umt {

ConcurrencyVerdict check_concurrent(Entity r) {
  if (!sets::is_relation(r)) throw PreconditionError("not a relation entity", r.str());
  EntityList dom = sets::domain(r).members();
  EntityList ran = sets::range(r).members();
  if (dom.size() > 24) throw CapExceeded("domain too large for exhaustive subsets");
  // pred[y] = mask of domain elements related to y.
  std::vector<std::uint64_t> pred(ran.size(), 0);
  for (Entity m : r.members()) {
    auto [x, y] = *decode_pair(m);
    auto xi = std::lower_bound(dom.begin(), dom.end(), x) - dom.begin();
    auto yi = std::lower_bound(ran.begin(), ran.end(), y) - ran.begin();
    pred[yi] |= std::uint64_t(1) << xi;
  }
  ConcurrencyVerdict v;
  std::uint64_t full = dom.empty() ? 0 : ((std::uint64_t(1) << dom.size()) - 1);
  for (std::uint64_t s = 1; s <= full; ++s) {
    bool ok = false;
    for (std::uint64_t p : pred)
      if ((p & s) == s) {
        ok = true;
        break;
      }
    if (!ok) {
      EntityList block;
      for (std::size_t i = 0; i < dom.size(); ++i)
        if ((s >> i) & 1u) block.push_back(dom[i]);
      v.concurrent = false;
      v.blocking = Entity::set(block);
      return v;
    }
  }
  for (std::size_t y = 0; y < ran.size(); ++y)
    if (pred[y] == full) {
      v.bound = ran[y];
      break;
    }
  return v;
}

Entity finite_subset_relation(Entity a) {
  EntityList out;
  for (Entity f : sets::power(a).members())
    for (Entity x : f.members()) out.push_back(kuratowski(x, f));
  return Entity::set(std::move(out));
}

int number_prefix(const StarMapContext& ctx) {
  int m = 0;
  while (std::binary_search(ctx.base().begin(), ctx.base().end(), Entity::atom(std::to_string(m)))) ++m;
  return m;
}

Hyperfinite hyperfinite_witness(Entity a, int prefix, const std::function<Entity(Entity)>& image) {
  if (!a.is_set()) throw PreconditionError("hyperfiniteness applies to sets", a.str());
  int n = static_cast<int>(a.size());
  if (n >= prefix)
    throw PreconditionError("number prefix too short: need " + std::to_string(n + 1) +
                            " numerals, have " + std::to_string(prefix));
  if (prefix > 16) throw CapExceeded("number prefix longer than 16");
  EntityList nums;
  for (int k = 0; k < prefix; ++k) nums.push_back(Entity::atom(std::to_string(k)));
  EntityList graph, lt;
  for (int k = 0; k < n; ++k) graph.push_back(kuratowski(image(nums[k]), a.members()[k]));
  for (int i = 0; i < prefix; ++i)
    for (int j = i + 1; j < prefix; ++j) lt.push_back(kuratowski(nums[i], nums[j]));
  Entity numbers = Entity::set(nums);
  Hyperfinite h;
  h.n = n;
  h.f = Entity::set(graph);
  Env env{{"A", a},
          {"f", h.f},
          {"n", image(nums[n])},
          {"N", image(numbers)},
          {"Lt", image(Entity::set(lt))},
          {"PN", image(sets::power(numbers))}};
  h.psi = eval_bounded(build_psi_hyperfinite(), env);
  return h;
}

std::optional<Hyperfinite> is_hyperfinite(const StarMapContext& ctx, Entity a) {
  if (classify(ctx, a).kind == Kind::External) throw PreconditionError("set is external", a.str());
  int prefix = number_prefix(ctx);
  Hyperfinite h = hyperfinite_witness(a, prefix, [&](Entity e) { return ctx.star_unbounded(e); });
  // A is a subset of *V_j(X) for some level, so A lies in *P(V_j(X)).
  for (int j = 0; j <= ctx.materialized_level(); ++j) {
    Entity b = Entity::set(ctx.level(j));
    if (!sets::subset(a, ctx.star_unbounded(b))) continue;
    if (b.size() <= 12 && !ctx.star_unbounded(sets::power(b)).contains(a)) continue;
    h.certificate = b;
    break;
  }
  if (!h.certificate.valid()) throw PreconditionError("no level of the base contains the set", a.str());
  if (!h.psi) return std::nullopt;
  return h;
}

CheckReport enlargement_check(const StarMapContext& ctx, const std::vector<Entity>& families) {
  CheckReport rep("enlargement-check");
  for (std::size_t k = 0; k < families.size(); ++k) {
    Entity fam = families[k];
    std::string tag = "family " + std::to_string(k);
    rep.count("families");
    if (!fam.is_set() || fam.members().empty()) {
      rep.note(tag + ": not a nonempty family, skipped");
      continue;
    }
    bool all_sets = std::all_of(fam.members().begin(), fam.members().end(),
                                [](Entity e) { return e.is_set(); });
    if (!all_sets) {
      rep.note(tag + ": has an atom member, skipped");
      continue;
    }
    // For a finite family the f.i.p. is a nonempty total intersection.
    Entity meet = sets::big_intersection(fam);
    if (meet.members().empty()) {
      rep.count("without_fip");
      rep.note(tag + ": precondition fails, no finite intersection property " + fam.str());
      continue;
    }
    Entity star_meet = sets::big_intersection(ctx.sigma_image(fam));
    rep.count("checked");
    if (star_meet.members().empty())
      rep.add(Counterexample{"intersection of images", {{"family", fam.str()}}, "empty", -1});
    else
      rep.note(tag + ": intersection " + star_meet.str());
  }
  return rep;
}

EnlargementResult enlargement_pipeline(const EntityList& base, int k, Entity target, bool drop_member) {
  EnlargementResult res;
  Entity vk = vn_entity(base, k);
  if (vk.size() > 6) throw CapExceeded("P(V_k(X)) must have at most 64 elements");
  if (!target.is_set()) throw PreconditionError("target must be a set", target.str());
  if (!sets::subset(target, vk)) throw PreconditionError("target must be a subset of V_k(X)", target.str());

  EntityList points = sets::power(vk).members();
  for (Entity p : points) res.index.push_back(p.str());
  IndexSet idx(res.index);
  std::vector<Mask> cones;
  for (Entity a : points) {
    Mask m = 0;
    for (std::size_t b = 0; b < points.size(); ++b)
      if (sets::subset(a, points[b])) m |= Mask(1) << b;
    cones.push_back(m);
  }
  SetFamily family(idx, cones);
  res.fip = has_fip(family);
  res.report.count("cones", static_cast<long long>(cones.size()));
  if (!res.fip) {
    res.report.fail("finite intersection property", "cones have an empty intersection");
    return res;
  }
  Ultrafilter u = extend_to_ultrafilter(family);
  res.ultrafilter = u;
  int top = static_cast<int>(std::find(points.begin(), points.end(), vk) - points.begin());
  res.principal_at_top = u.point() == top;
  if (!res.principal_at_top) res.report.fail("principal point", "ultrafilter sits at " + idx.id(u.point()));
  for (Mask c : family.members)
    if (!u.contains(c)) res.report.fail("extension", "cone " + idx.show(c) + " not in the ultrafilter");

  StarMapContext ctx(base, std::max(1, target.rank()), u);
  PointwiseFunction g;
  for (std::size_t i = 0; i < points.size(); ++i) {
    Entity gi = sets::intersect(points[i], target);
    if (drop_member && static_cast<int>(i) == u.point() && gi.size() > 0) {
      EntityList m(gi.members().begin() + 1, gi.members().end());
      gi = Entity::set(m);
    }
    g.push_back(gi);
  }
  res.a = ctx.quotient(g);
  res.sigma_b = ctx.sigma_image(target);
  res.star_b = ctx.star(target);
  if (!sets::subset(res.sigma_b, res.a))
    res.report.fail("sigma image inside A", res.sigma_b.str() + " not a subset of " + res.a.str());
  if (!sets::subset(res.a, res.star_b))
    res.report.fail("A inside the image", res.a.str() + " not a subset of " + res.star_b.str());

  for (Entity x : base)
    if (std::all_of(x.name().begin(), x.name().end(), ::isdigit))
      throw PreconditionError("numeral atoms are reserved for the hyperfiniteness certificate", x.name());
  Hyperfinite h = hyperfinite_witness(res.a, static_cast<int>(res.a.size()) + 1,
                                      [&](Entity e) { return ctx.star_unbounded(e); });
  if (!h.psi) res.report.fail("hyperfinite", "formula fails for " + h.f.str());
  res.report.note("A = " + res.a.str() + " with bijection " + h.f.str());
  return res;
}

Entity extend_function(const StarMapContext& ctx, Entity a, Entity b, const std::map<Entity, Entity>& f) {
  if (!a.is_set() || !b.is_set()) throw PreconditionError("domain and codomain must be sets");
  Entity sb = ctx.star(b);
  std::map<Entity, Entity> back;
  for (Entity y : b.members()) back[ctx.star_unbounded(y)] = y;
  int isz = ctx.index().size();
  int point = ctx.ultrafilter().point();
  std::vector<EntityList> graphs(isz);
  for (Entity x : a.members()) {
    auto it = f.find(x);
    if (it == f.end()) throw PreconditionError("function undefined at", x.str());
    if (!sb.contains(it->second)) throw PreconditionError("value not in the image of B", it->second.str());
    Entity rep = back.at(it->second);
    for (int i = 0; i < isz; ++i)
      graphs[i].push_back(kuratowski(x, i == point ? rep : b.members().front()));
  }
  PointwiseFunction family;
  for (auto& g : graphs) family.push_back(Entity::set(g));
  Entity plus = ctx.quotient(family, false);
  for (Entity x : a.members()) {
    auto v = sets::apply(plus, ctx.star(x));
    if (!v || *v != f.at(x)) throw Error("extension disagrees with f at " + x.str());
  }
  return plus;
}

OrderReversal::OrderReversal(std::vector<std::string> ground_set, IndexSet idx, std::vector<Mask> values)
    : ground(std::move(ground_set)), index(std::move(idx)), p(std::move(values)) {
  if (ground.size() > 16) throw CapExceeded("ground sets are limited to 16 elements");
  if (p.size() != (std::size_t(1) << ground.size())) throw Error("reversal must be total on P(X)");
  for (Mask m : p)
    if (m & ~index.full()) throw Error("reversal value outside the index set");
}

OrderReversal OrderReversal::constant(std::vector<std::string> ground_set, IndexSet idx, Mask value) {
  std::size_t n = std::size_t(1) << ground_set.size();
  return OrderReversal(std::move(ground_set), std::move(idx), std::vector<Mask>(n, value));
}

std::string OrderReversal::show_subset(Mask s) const {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < ground.size(); ++i)
    if ((s >> i) & 1u) {
      if (!first) out += ",";
      out += ground[i];
      first = false;
    }
  return out + "}";
}

LawVerdict is_order_reversal(const OrderReversal& p) {
  Mask full = p.full_ground();
  for (Mask s = 0; s <= full; ++s)
    for (Mask t = 0; t <= full; ++t) {
      Mask both = p.at(s) & p.at(t);
      if ((p.at(s | t) & ~both) != 0) return {false, std::make_pair(s, t)};
    }
  return {};
}

LawVerdict is_anti_additive(const OrderReversal& p) {
  LawVerdict v = is_order_reversal(p);
  if (!v.holds) return v;
  Mask full = p.full_ground();
  for (Mask s = 0; s <= full; ++s)
    for (Mask t = 0; t <= full; ++t)
      if (p.at(s | t) != (p.at(s) & p.at(t))) return {false, std::make_pair(s, t)};
  return {};
}

LocalFiniteness is_locally_finite(const OrderReversal& p) {
  LocalFiniteness lf;
  lf.bound.assign(p.index.size(), -1);
  for (Mask s = 0; s <= p.full_ground(); ++s)
    for (int i = 0; i < p.index.size(); ++i)
      if ((p.at(s) >> i) & 1u) lf.bound[i] = std::max(lf.bound[i], std::popcount(s));
  return lf;
}

Support support_of(const OrderReversal& p) {
  LawVerdict v = is_anti_additive(p);
  if (!v.holds) {
    std::string w = v.witness ? " (" + p.show_subset(v.witness->first) + ", " +
                                    p.show_subset(v.witness->second) + ")"
                              : "";
    throw PreconditionError("reversal is not anti-additive", "violating pair" + w);
  }
  Support s{p.index, std::vector<std::optional<Mask>>(p.index.size())};
  for (int i = 0; i < p.index.size(); ++i) {
    if (!((p.at(0) >> i) & 1u)) continue;
    Mask phi = 0;
    for (Mask t = 0; t <= p.full_ground(); ++t)
      if ((p.at(t) >> i) & 1u) phi |= t;
    s.phi[i] = phi;
  }
  return s;
}

OrderReversal reversal_from_support(const Support& s, const std::vector<std::string>& ground) {
  Mask full = ground.empty() ? 0 : ((Mask(1) << ground.size()) - 1);
  std::vector<Mask> vals(std::size_t(full) + 1, 0);
  for (int i = 0; i < s.index.size(); ++i) {
    if (!s.phi.at(i)) continue;
    if (*s.phi[i] & ~full) throw Error("support value outside the ground set");
    for (Mask t = 0; t <= full; ++t)
      if ((t & *s.phi[i]) == t) vals[t] |= Mask(1) << i;
  }
  return OrderReversal(ground, s.index, std::move(vals));
}

Localized localize(const OrderReversal& p, const std::vector<Mask>& chain) {
  if (chain.empty() || chain.front() != p.index.full())
    throw PreconditionError("chain must start with the whole index set");
  for (std::size_t k = 1; k < chain.size(); ++k)
    if ((chain[k] & ~chain[k - 1]) != 0)
      throw PreconditionError("chain is not descending at position " + std::to_string(k));
  if (chain.size() < p.ground.size() + 1)
    throw PreconditionError("chain needs at least |X|+1 members");
  std::vector<Mask> vals(p.p.size());
  for (Mask s = 0; s <= p.full_ground(); ++s) vals[s] = p.at(s) & chain[std::popcount(s)];
  Localized out{OrderReversal(p.ground, p.index, vals), {}, CheckReport("localize")};
  out.level.assign(p.index.size(), static_cast<int>(chain.size()));
  for (int i = 0; i < p.index.size(); ++i)
    for (std::size_t n = 0; n < chain.size(); ++n)
      if (!((chain[n] >> i) & 1u)) {
        out.level[i] = static_cast<int>(n);
        break;
      }
  for (Mask s = 0; s <= p.full_ground(); ++s)
    if ((out.lp.at(s) & ~p.at(s)) != 0) out.report.fail("below p", p.show_subset(s));
  LawVerdict rev = is_order_reversal(out.lp);
  if (!rev.holds && is_order_reversal(p).holds)
    out.report.fail("order-reversal", p.show_subset(rev.witness->first) + " " + p.show_subset(rev.witness->second));
  LocalFiniteness lf = is_locally_finite(out.lp);
  for (int i = 0; i < p.index.size(); ++i) {
    out.report.count("indices");
    if (lf.bound[i] >= out.level[i])
      out.report.fail("cardinality bound", "index " + p.index.id(i) + ": " + std::to_string(lf.bound[i]) +
                                                " >= " + std::to_string(out.level[i]));
  }
  if (chain.back() != 0)
    out.report.note("the chain has a nonempty intersection " + p.index.show(chain.back()));
  else
    out.report.note("the chain reaches the empty set, so it cannot lie in an ultrafilter on a finite set");
  return out;
}

OrderReversal monotone_antiadditive(const OrderReversal& p) {
  for (std::size_t k = 0; k < p.ground.size(); ++k)
    if (p.ground[k] != std::to_string(k))
      throw PreconditionError("ground set must be the initial segment 0..m in order");
  std::vector<Mask> vals(p.p.size());
  for (Mask s = 0; s <= p.full_ground(); ++s) {
    if (s == 0) {
      vals[s] = p.at(0);
      continue;
    }
    int top = 63 - std::countl_zero(s);
    vals[s] = p.at((Mask(1) << (top + 1)) - 1);
  }
  return OrderReversal(p.ground, p.index, std::move(vals));
}

OrderReversal reversal_of(const SetSystem& sys) {
  std::size_t g = sys.ground.size();
  if (sys.sets.size() != static_cast<std::size_t>(sys.index.size()) ||
      sys.domain.size() != sys.sets.size())
    throw Error("set system does not match its index set");
  std::vector<Mask> vals(std::size_t(1) << g, 0);
  for (int i = 0; i < sys.index.size(); ++i) {
    if (sys.domain[i] < 0 || sys.domain[i] > 64) throw Error("domains hold at most 64 points");
    Mask dom = sys.domain[i] == 64 ? ~Mask(0) : ((Mask(1) << sys.domain[i]) - 1);
    for (Mask s = 0; s < vals.size(); ++s) {
      Mask meet = dom;
      for (std::size_t t = 0; t < g; ++t)
        if ((s >> t) & 1u) meet &= sys.sets[i].at(t);
      if (meet) vals[s] |= Mask(1) << i;
    }
  }
  return OrderReversal(sys.ground, sys.index, std::move(vals));
}

Realization realize_support(const SetSystem& sys, const Support& phi, const Ultrafilter& u) {
  Realization r;
  OrderReversal p = reversal_of(sys);
  bool ok = true;
  for (int i = 0; i < sys.index.size(); ++i) {
    if (!phi.phi.at(i) || !((p.at(*phi.phi[i]) >> i) & 1u)) {
      r.report.note("condition (i) fails at index " + sys.index.id(i));
      ok = false;
    }
  }
  for (std::size_t t = 0; t < sys.ground.size(); ++t) {
    Mask holders = 0;
    for (int i = 0; i < sys.index.size(); ++i)
      if (phi.phi.at(i) && ((*phi.phi[i] >> t) & 1u)) holders |= Mask(1) << i;
    if (!u.contains(holders)) {
      r.report.note("condition (ii) fails for " + sys.ground[t]);
      ok = false;
    }
  }
  r.supported = ok;
  if (!ok) return r;
  r.choice.assign(sys.index.size(), -1);
  for (int i = 0; i < sys.index.size(); ++i) {
    Mask meet = sys.domain[i] == 64 ? ~Mask(0) : ((Mask(1) << sys.domain[i]) - 1);
    for (std::size_t t = 0; t < sys.ground.size(); ++t)
      if ((*phi.phi[i] >> t) & 1u) meet &= sys.sets[i][t];
    r.choice[i] = std::countr_zero(meet);
  }
  // The class of (a_i) satisfies t when {i : a_i in S_t at i} is in U.
  for (std::size_t t = 0; t < sys.ground.size(); ++t) {
    Mask sat = 0;
    for (int i = 0; i < sys.index.size(); ++i)
      if ((sys.sets[i][t] >> r.choice[i]) & 1u) sat |= Mask(1) << i;
    r.report.count("ground");
    if (!u.contains(sat)) r.report.fail("realized element misses " + sys.ground[t]);
  }
  return r;
}

}  // namespace umt
