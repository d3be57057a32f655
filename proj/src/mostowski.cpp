#include "umt/mostowski.hpp"

#include <algorithm>
#include <set>

#include "umt/error.hpp"
#include "umt/superstructure.hpp"

namespace umt {

EpsilonModel::EpsilonModel(std::vector<std::string> carrier,
                           const std::vector<std::pair<std::string, std::string>>& edges,
                           const std::string& base)
    : carrier_(std::move(carrier)) {
  if (carrier_.empty()) throw Error("carrier must be nonempty");
  for (std::size_t i = 0; i < carrier_.size(); ++i)
    if (!index_.emplace(carrier_[i], static_cast<int>(i)).second)
      throw Error("duplicate node '" + carrier_[i] + "'");
  std::size_t n = carrier_.size();
  adj_.assign(n * n, 0);
  preds_.resize(n);
  for (const auto& [b, a] : edges) {
    int bi = index_of(b), ai = index_of(a);
    adj_[static_cast<std::size_t>(bi) * n + ai] = 1;
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (adj_[b * n + a]) preds_[a].push_back(static_cast<int>(b));
  base_ = index_of(base);
}

int EpsilonModel::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error("unknown node '" + id + "'");
  return it->second;
}

std::vector<std::pair<std::string, std::string>> EpsilonModel::edges() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (int a = 0; a < size(); ++a)
    for (int b : preds_[a]) out.push_back({carrier_[b], carrier_[a]});
  return out;
}

EpsilonModel EpsilonModel::restrict(const std::vector<int>& nodes) const {
  std::vector<int> keep(nodes);
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (!std::binary_search(keep.begin(), keep.end(), base_))
    throw PreconditionError("submodel must contain the distinguished node");
  std::vector<std::string> ids;
  std::vector<char> in(size(), 0);
  for (int k : keep) {
    ids.push_back(carrier_.at(k));
    in[k] = 1;
  }
  std::vector<std::pair<std::string, std::string>> es;
  for (int a : keep)
    for (int b : preds_[a])
      if (in[b]) es.push_back({carrier_[b], carrier_[a]});
  return EpsilonModel(ids, es, carrier_[base_]);
}

Structure EpsilonModel::as_structure(const std::string& rel) const {
  Language lang;
  lang.relations[rel] = 2;
  Structure s(lang, carrier_);
  for (int a = 0; a < size(); ++a)
    for (int b : preds_[a]) s.add_tuple(rel, {b, a});
  return s;
}

bool EpsilonModel::operator==(const EpsilonModel& o) const {
  return carrier_ == o.carrier_ && adj_ == o.adj_ && base_ == o.base_;
}

BaseVerdict check_base(const EpsilonModel& m) {
  BaseVerdict v;
  for (int b : m.preds(m.base()))
    if (!m.preds(b).empty()) {
      v.holds = false;
      v.witness = std::make_pair(m.id(m.preds(b).front()), m.id(b));
      return v;
    }
  return v;
}

std::vector<int> nu_levels(const EpsilonModel& m) {
  int n = m.size();
  std::vector<int> level(n, -1);
  for (int b : m.preds(m.base())) level[b] = 0;
  // A node enters at k+1 once all its predecessors are at level <= k.
  for (int k = 0; k <= n; ++k) {
    std::vector<int> fresh;
    for (int a = 0; a < n; ++a) {
      if (level[a] >= 0) continue;
      bool all = std::all_of(m.preds(a).begin(), m.preds(a).end(),
                             [&](int b) { return level[b] >= 0 && level[b] <= k; });
      if (all) fresh.push_back(a);
    }
    if (fresh.empty()) break;
    for (int a : fresh) level[a] = k + 1;
  }
  return level;
}

EpsilonModel truncate(const EpsilonModel& m) {
  BaseVerdict b = check_base(m);
  if (!b.holds)
    throw PreconditionError("distinguished node fails BASE", b.witness->first + " E " + b.witness->second);
  std::vector<int> level = nu_levels(m), keep;
  for (int a = 0; a < m.size(); ++a)
    if (level[a] >= 0) keep.push_back(a);
  return m.restrict(keep);
}

namespace {

struct ModelEval {
  const EpsilonModel& m;
  std::vector<std::pair<const std::string*, int>> stack;

  int lookup(const Term& t) const {
    if (t.kind != Term::Kind::Var) throw Error("only variables can be evaluated in an epsilon model");
    for (auto it = stack.rbegin(); it != stack.rend(); ++it)
      if (*it->first == t.name) return it->second;
    throw Error("unbound variable '" + t.name + "'");
  }

  bool quant(const Formula& f, const std::vector<int>& range, bool universal) {
    stack.emplace_back(&f.symbol(), 0);
    bool result = universal;
    for (int v : range) {
      stack.back().second = v;
      if (run(f.left()) != universal) {
        result = !universal;
        break;
      }
    }
    stack.pop_back();
    return result;
  }

  bool run(const Formula& f) {
    switch (f.kind()) {
      case FKind::Eq: return lookup(f.terms()[0]) == lookup(f.terms()[1]);
      case FKind::Mem: return m.edge(lookup(f.terms()[0]), lookup(f.terms()[1]));
      case FKind::Rel: throw Error("relation symbol in a membership formula");
      case FKind::Not: return !run(f.left());
      case FKind::And: return run(f.left()) && run(f.right());
      case FKind::Or: return run(f.left()) || run(f.right());
      case FKind::Implies: return !run(f.left()) || run(f.right());
      case FKind::Iff: return run(f.left()) == run(f.right());
      case FKind::Forall:
      case FKind::Exists: {
        std::vector<int> all(m.size());
        for (int i = 0; i < m.size(); ++i) all[i] = i;
        return quant(f, all, f.kind() == FKind::Forall);
      }
      case FKind::BForall:
      case FKind::BExists:
        return quant(f, m.preds(lookup(f.bound())), f.kind() == FKind::BForall);
    }
    return false;
  }
};

}  // namespace

bool eval_model(const EpsilonModel& m, const Formula& f, const std::map<std::string, std::string>& env) {
  ModelEval ev{m, {}};
  std::vector<std::pair<std::string, int>> owned;
  for (const auto& [k, v] : env) owned.push_back({k, m.index_of(v)});
  for (const auto& [k, v] : owned) ev.stack.emplace_back(&k, v);
  return ev.run(f);
}

ExtensionalityVerdict is_extensional_over(const EpsilonModel& m) {
  ExtensionalityVerdict v;
  std::vector<char> below(m.size(), 0);
  for (int b : m.preds(m.base())) below[b] = 1;
  std::map<std::vector<int>, int> seen;
  for (int a = 0; a < m.size(); ++a) {
    if (below[a]) continue;
    auto [it, fresh] = seen.emplace(m.preds(a), a);
    if (!fresh) {
      v.holds = false;
      v.witness = std::make_pair(m.id(it->second), m.id(a));
      return v;
    }
  }
  return v;
}

std::string collapse_atom_name(const std::string& id) { return "atom_" + id; }

CollapseResult collapse(const EpsilonModel& m) {
  BaseVerdict b = check_base(m);
  if (!b.holds)
    throw PreconditionError("distinguished node fails BASE", b.witness->first + " E " + b.witness->second);
  CollapseResult r;
  r.levels = nu_levels(m);
  for (int a = 0; a < m.size(); ++a)
    if (r.levels[a] < 0) throw PreconditionError("model is not its own truncation", m.id(a));
  ExtensionalityVerdict ext = is_extensional_over(m);
  if (!ext.holds)
    throw PreconditionError("model is not extensional over the base",
                            ext.witness->first + ", " + ext.witness->second);
  for (int y : m.preds(m.base()))
    if (!valid_atom_name(collapse_atom_name(m.id(y))))
      throw PreconditionError("node id cannot name an atom", m.id(y));

  std::vector<int> order(m.size());
  for (int a = 0; a < m.size(); ++a) order[a] = a;
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return r.levels[x] < r.levels[y]; });
  r.h.assign(m.size(), Entity());
  for (int a : order) {
    if (r.levels[a] == 0) {
      r.h[a] = Entity::atom(collapse_atom_name(m.id(a)));
      continue;
    }
    EntityList members;
    for (int b : m.preds(a)) members.push_back(r.h[b]);
    r.h[a] = Entity::set(std::move(members));
  }
  r.image = Entity::set(r.h);
  return r;
}

CheckReport verify_collapse(const EpsilonModel& m, const CollapseResult& r, int depth) {
  CheckReport rep("collapse");
  if (static_cast<int>(r.h.size()) != m.size()) {
    rep.fail("shape", "map size differs from the carrier");
    return rep;
  }
  std::vector<char> below(m.size(), 0);
  EntityList y_image;
  for (int y : m.preds(m.base())) {
    below[y] = 1;
    y_image.push_back(r.h[y]);
    rep.count("base_atoms");
    if (!r.h[y].is_atom()) rep.fail("base node maps to an atom", m.id(y) + " -> " + r.h[y].str());
  }
  if (r.h[m.base()] != Entity::set(y_image))
    rep.fail("h(X) = Y", r.h[m.base()].str() + " != " + Entity::set(y_image).str());

  std::map<Entity, int> inverse;
  for (int a = 0; a < m.size(); ++a) {
    auto [it, fresh] = inverse.emplace(r.h[a], a);
    if (!fresh) rep.fail("injective", m.id(it->second) + " and " + m.id(a) + " both map to " + r.h[a].str());
  }
  Entity image = r.image;
  if (image != Entity::set(r.h)) rep.fail("image", "recorded image differs from the range of h");
  for (Entity v : image.members()) {
    rep.count("image");
    for (Entity x : v.members())
      if (!image.contains(x)) rep.fail("transitive", x.str() + " in " + v.str() + " lies outside the image");
  }
  for (int a = 0; a < m.size(); ++a)
    for (int b = 0; b < m.size(); ++b) {
      rep.count("pairs");
      if (m.edge(b, a) != r.h[a].contains(r.h[b]))
        rep.fail("membership", m.id(b) + " E " + m.id(a) + " vs " + r.h[b].str() + " in " + r.h[a].str());
    }
  if (!rep.passed()) return rep;

  // The collapse as an embedding into the entity world.
  EntityList world = transitive_closure(image.members());
  Language lang;
  lang.relations["E"] = 2;
  std::vector<std::string> ids;
  std::map<Entity, int> widx;
  for (Entity e : world) {
    widx[e] = static_cast<int>(ids.size());
    ids.push_back(e.str());
  }
  Structure w(lang, ids);
  for (Entity e : world)
    for (Entity x : e.members()) w.add_tuple("E", {widx.at(x), widx.at(e)});
  std::vector<std::string> img_ids;
  for (Entity e : image.members()) img_ids.push_back(e.str());
  Structure sub(lang, img_ids);
  for (std::size_t i = 0; i < image.members().size(); ++i)
    for (std::size_t j = 0; j < image.members().size(); ++j)
      if (image.members()[i].contains(image.members()[j]))
        sub.add_tuple("E", {static_cast<int>(j), static_cast<int>(i)});
  rep.merge(is_transitive_submodel(sub, w), "world");
  std::vector<int> h(m.size());
  for (int a = 0; a < m.size(); ++a) h[a] = widx.at(r.h[a]);
  EnumOptions opt;
  opt.max_depth = depth;
  rep.merge(check_elementary_embedding(h, m.as_structure(), w, opt), "elementary");
  return rep;
}

EpsilonModel epsilon_graph(Entity e) {
  EntityList closure = transitive_closure({e});
  EntityList atoms;
  for (Entity x : closure)
    if (x.is_atom()) atoms.push_back(x);
  Entity xs = Entity::set(atoms);
  std::vector<std::string> carrier;
  std::set<std::string> used;
  for (Entity x : closure) {
    carrier.push_back(x.str());
    used.insert(x.str());
  }
  std::string base;
  bool reuse = std::binary_search(closure.begin(), closure.end(), xs);
  if (reuse) {
    base = xs.str();
  } else {
    base = "X";
    while (used.count(base)) base += "'";
    carrier.push_back(base);
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (Entity s : closure)
    for (Entity x : s.members()) edges.push_back({x.str(), s.str()});
  if (!reuse)
    for (Entity a : atoms) edges.push_back({a.str(), base});
  return EpsilonModel(carrier, edges, base);
}

Entity rename_atoms_for_collapse(Entity e) {
  if (e.is_atom()) return Entity::atom(collapse_atom_name(e.name()));
  EntityList m;
  for (Entity x : e.members()) m.push_back(rename_atoms_for_collapse(x));
  return Entity::set(std::move(m));
}

}  // namespace umt
