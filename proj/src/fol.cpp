#include "umt/fol.hpp"

#include <algorithm>
#include <numeric>

#include "umt/error.hpp"

namespace umt {

Structure::Structure(Language lang, std::vector<std::string> universe)
    : lang_(std::move(lang)), universe_(std::move(universe)) {
  lang_.validate();
  if (universe_.empty()) throw Error("structure universe must be nonempty");
  for (std::size_t i = 0; i < universe_.size(); ++i)
    if (!index_.emplace(universe_[i], static_cast<int>(i)).second)
      throw Error("duplicate element '" + universe_[i] + "'");
  auto table_size = [&](int arity) {
    std::size_t n = 1;
    for (int i = 0; i < arity; ++i) {
      n *= universe_.size();
      if (n > 4000000) throw CapExceeded("relation table too large");
    }
    return n;
  };
  for (const auto& [r, ar] : lang_.relations) rel_[r].assign(table_size(ar), 0);
  for (const auto& [f, ar] : lang_.functions) fn_[f].assign(table_size(ar), -1);
}

int Structure::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error("unknown element '" + id + "'");
  return it->second;
}

std::size_t Structure::offset(const std::vector<int>& args) const {
  std::size_t off = 0;
  for (int a : args) {
    if (a < 0 || a >= size()) throw Error("element index out of range");
    off = off * universe_.size() + static_cast<std::size_t>(a);
  }
  return off;
}

void Structure::set_relation(const std::string& r, const std::vector<std::vector<int>>& tuples) {
  auto& t = rel_.at(r);
  std::fill(t.begin(), t.end(), 0);
  for (const auto& tup : tuples) add_tuple(r, tup);
}

void Structure::add_tuple(const std::string& r, const std::vector<int>& args) {
  auto it = lang_.relations.find(r);
  if (it == lang_.relations.end()) throw Error("unknown relation '" + r + "'");
  if (static_cast<int>(args.size()) != it->second) throw Error("arity mismatch for '" + r + "'");
  rel_.at(r)[offset(args)] = 1;
}

bool Structure::holds(const std::string& r, const std::vector<int>& args) const {
  auto it = rel_.find(r);
  if (it == rel_.end()) throw Error("unknown relation '" + r + "'");
  if (static_cast<int>(args.size()) != lang_.relations.at(r))
    throw Error("arity mismatch for '" + r + "'");
  return it->second[offset(args)] != 0;
}

const std::vector<char>& Structure::relation_table(const std::string& r) const {
  auto it = rel_.find(r);
  if (it == rel_.end()) throw Error("unknown relation '" + r + "'");
  return it->second;
}

void Structure::set_value(const std::string& f, const std::vector<int>& args, int value) {
  auto it = lang_.functions.find(f);
  if (it == lang_.functions.end()) throw Error("unknown function '" + f + "'");
  if (static_cast<int>(args.size()) != it->second) throw Error("arity mismatch for '" + f + "'");
  if (value < 0 || value >= size()) throw Error("function value out of range");
  fn_.at(f)[offset(args)] = value;
}

int Structure::value(const std::string& f, const std::vector<int>& args) const {
  auto it = fn_.find(f);
  if (it == fn_.end()) throw Error("unknown function '" + f + "'");
  if (static_cast<int>(args.size()) != lang_.functions.at(f))
    throw Error("arity mismatch for '" + f + "'");
  int v = it->second[offset(args)];
  if (v < 0) throw Error("function '" + f + "' is not total");
  return v;
}

const std::vector<int>& Structure::function_table(const std::string& f) const {
  auto it = fn_.find(f);
  if (it == fn_.end()) throw Error("unknown function '" + f + "'");
  return it->second;
}

void Structure::validate() const {
  for (const auto& [f, t] : fn_)
    for (int v : t)
      if (v < 0) throw Error("function '" + f + "' is not total");
}

std::vector<std::vector<int>> Structure::tuples(const std::string& r) const {
  const auto& t = relation_table(r);
  int ar = lang_.relations.at(r);
  std::vector<std::vector<int>> out;
  for (std::size_t off = 0; off < t.size(); ++off) {
    if (!t[off]) continue;
    std::vector<int> args(ar);
    std::size_t rem = off;
    for (int i = ar - 1; i >= 0; --i) {
      args[i] = static_cast<int>(rem % universe_.size());
      rem /= universe_.size();
    }
    out.push_back(std::move(args));
  }
  return out;
}

namespace {

using Env = std::map<std::string, int>;

int term_index(const Structure& s, const Term& t, const Env& env) {
  switch (t.kind) {
    case Term::Kind::Var: {
      auto it = env.find(t.name);
      if (it == env.end()) throw Error("unassigned variable '" + t.name + "'");
      return it->second;
    }
    case Term::Kind::Const:
      if (!s.language().has_function(t.name)) throw Error("unknown symbol '" + t.name + "'");
      return s.value(t.name, {});
    case Term::Kind::Apply: {
      if (!s.language().has_function(t.name)) throw Error("unknown symbol '" + t.name + "'");
      std::vector<int> args;
      for (const Term& a : t.args) args.push_back(term_index(s, a, env));
      return s.value(t.name, args);
    }
    case Term::Kind::Entity:
      throw Error("entity constant in a first-order formula");
  }
  return -1;
}

bool sat(const Structure& s, const Formula& f, Env& env) {
  switch (f.kind()) {
    case FKind::Eq:
      return term_index(s, f.terms()[0], env) == term_index(s, f.terms()[1], env);
    case FKind::Rel: {
      if (!s.language().has_relation(f.symbol()))
        throw Error("unknown symbol '" + f.symbol() + "'");
      std::vector<int> args;
      for (const Term& t : f.terms()) args.push_back(term_index(s, t, env));
      return s.holds(f.symbol(), args);
    }
    case FKind::Mem:
      throw Error("membership atom in a first-order formula");
    case FKind::Not:
      return !sat(s, f.left(), env);
    case FKind::And:
      return sat(s, f.left(), env) && sat(s, f.right(), env);
    case FKind::Or:
      return sat(s, f.left(), env) || sat(s, f.right(), env);
    case FKind::Implies:
      return !sat(s, f.left(), env) || sat(s, f.right(), env);
    case FKind::Iff:
      return sat(s, f.left(), env) == sat(s, f.right(), env);
    case FKind::Forall:
    case FKind::Exists: {
      bool universal = f.kind() == FKind::Forall;
      auto saved = env.find(f.symbol());
      std::optional<int> old;
      if (saved != env.end()) old = saved->second;
      bool result = universal;
      for (int d = 0; d < s.size(); ++d) {
        env[f.symbol()] = d;
        bool v = sat(s, f.left(), env);
        if (universal && !v) {
          result = false;
          break;
        }
        if (!universal && v) {
          result = true;
          break;
        }
      }
      if (old) env[f.symbol()] = *old;
      else env.erase(f.symbol());
      return result;
    }
    case FKind::BForall:
    case FKind::BExists:
      throw Error("bounded quantifier in a first-order formula");
  }
  return false;
}

Env to_env(const Structure& s, const Assignment& a) {
  Env env;
  for (const auto& [v, id] : a) env[v] = s.index_of(id);
  return env;
}

}  // namespace

std::string eval_term(const Structure& s, const Term& t, const Assignment& a) {
  Env env = to_env(s, a);
  return s.element(term_index(s, t, env));
}

bool satisfies(const Structure& s, const Formula& f, const Assignment& a) {
  Env env = to_env(s, a);
  return sat(s, f, env);
}

std::vector<Formula> enumerate_formulas(const Language& lang, const std::vector<std::string>& vars,
                                        int max_depth, int depth_cap) {
  if (max_depth > depth_cap)
    throw CapExceeded("depth " + std::to_string(max_depth) + " exceeds the cap of " + std::to_string(depth_cap));
  EnumOptions opt;
  opt.vars = vars;
  opt.max_depth = max_depth;
  FormulaTable t = enumerate_table(lang, opt);
  std::vector<Formula> out;
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out.push_back(t.formula(i));
  return out;
}

int term_value(const Structure& s, const Term& t, const std::vector<std::string>& vars,
               const AssignmentSpace& space, std::size_t assignment) {
  switch (t.kind) {
    case Term::Kind::Var:
      for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == t.name) return space.value(assignment, static_cast<int>(i));
      throw Error("unassigned variable '" + t.name + "'");
    case Term::Kind::Const:
      return s.value(t.name, {});
    case Term::Kind::Apply: {
      std::vector<int> args;
      for (const Term& a : t.args) args.push_back(term_value(s, a, vars, space, assignment));
      return s.value(t.name, args);
    }
    case Term::Kind::Entity:
      throw Error("entity constant in a first-order formula");
  }
  return -1;
}

MaskTable structure_masks(const FormulaTable& table, const Structure& s) {
  s.validate();
  auto filler = [&](std::size_t atom, const AssignmentSpace& space, MaskTable& m,
                    std::size_t row) {
    const Formula& f = table.atoms[atom];
    for (std::size_t a = 0; a < space.count; ++a) {
      bool v;
      if (f.kind() == FKind::Eq) {
        v = term_value(s, f.terms()[0], table.vars, space, a) ==
            term_value(s, f.terms()[1], table.vars, space, a);
      } else {
        std::vector<int> args;
        for (const Term& t : f.terms()) args.push_back(term_value(s, t, table.vars, space, a));
        v = s.holds(f.symbol(), args);
      }
      if (v) m.set(row, a);
    }
  };
  return evaluate_table(table, s.size(), filler);
}

CheckReport check_elementary_embedding(const std::vector<int>& h, const Structure& a,
                                       const Structure& b, const EnumOptions& opt) {
  if (!(a.language() == b.language())) throw Error("structures have different languages");
  return check_elementary_embedding(h, a, b, enumerate_table(a.language(), opt));
}

CheckReport check_elementary_embedding(const std::vector<int>& h, const Structure& a,
                                       const Structure& b, const FormulaTable& table) {
  if (!(a.language() == b.language())) throw Error("structures have different languages");
  if (static_cast<int>(h.size()) != a.size()) throw Error("map does not cover the domain");
  for (int v : h)
    if (v < 0 || v >= b.size()) throw Error("map leaves the codomain");
  CheckReport rep("elementary-embedding");
  MaskTable ma = structure_masks(table, a);
  MaskTable mb = structure_masks(table, b);
  int k = static_cast<int>(table.vars.size());
  AssignmentSpace sa(a.size(), k), sb(b.size(), k);
  std::vector<std::size_t> image(sa.count);
  for (std::size_t s = 0; s < sa.count; ++s) {
    std::vector<int> vals(k);
    for (int i = 0; i < k; ++i) vals[i] = h[sa.value(s, i)];
    image[s] = sb.encode(vals);
  }
  long long instances = 0;
  for (std::size_t f = 0; f < table.size(); ++f) {
    std::uint32_t fr = table.nodes[f].free;
    for (std::size_t s = 0; s < sa.count; ++s) {
      // Only one representative per tuple of the free variables.
      bool canonical = true;
      for (int i = 0; i < k; ++i)
        if (!((fr >> i) & 1u) && sa.value(s, i) != 0) canonical = false;
      if (!canonical) continue;
      ++instances;
      if (ma.get(f, s) == mb.get(f, image[s])) continue;
      Counterexample c;
      c.formula = to_string(table.formula(f));
      c.depth = table.nodes[f].depth;
      for (int i = 0; i < k; ++i)
        if ((fr >> i) & 1u) c.assignment.emplace_back(table.vars[i], a.element(sa.value(s, i)));
      c.detail = std::string("domain ") + (ma.get(f, s) ? "true" : "false") + ", codomain " +
                 (mb.get(f, image[s]) ? "true" : "false");
      rep.add(std::move(c));
    }
  }
  rep.set_stat("instances", instances);
  rep.set_stat("formulas", static_cast<long long>(table.size()));
  rep.set_stat("depth", table.max_depth());
  if (table.sampled) rep.note("top-level conjunctions sampled");
  return rep;
}

std::string element_constant(const std::string& id) {
  std::string out = "c_";
  for (char ch : id) {
    bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
    out += ok ? ch : '_';
  }
  return out;
}

namespace {

Term subst_term(const Term& t, const std::map<std::string, Term>& m) {
  if (t.kind == Term::Kind::Var) {
    auto it = m.find(t.name);
    return it == m.end() ? t : it->second;
  }
  if (t.kind == Term::Kind::Apply) {
    std::vector<Term> args;
    for (const Term& a : t.args) args.push_back(subst_term(a, m));
    return Term::apply(t.name, std::move(args));
  }
  return t;
}

// Substitutes closed terms for free variables.
Formula subst(const Formula& f, const std::map<std::string, Term>& m) {
  using F = Formula;
  switch (f.kind()) {
    case FKind::Eq:
      return F::eq(subst_term(f.terms()[0], m), subst_term(f.terms()[1], m));
    case FKind::Mem:
      return F::mem(subst_term(f.terms()[0], m), subst_term(f.terms()[1], m));
    case FKind::Rel: {
      std::vector<Term> args;
      for (const Term& t : f.terms()) args.push_back(subst_term(t, m));
      return F::rel(f.symbol(), std::move(args));
    }
    case FKind::Not:
      return F::neg(subst(f.left(), m));
    case FKind::And:
      return F::conj(subst(f.left(), m), subst(f.right(), m));
    case FKind::Or:
      return F::disj(subst(f.left(), m), subst(f.right(), m));
    case FKind::Implies:
      return F::implies(subst(f.left(), m), subst(f.right(), m));
    case FKind::Iff:
      return F::iff(subst(f.left(), m), subst(f.right(), m));
    case FKind::Forall:
    case FKind::Exists:
    case FKind::BForall:
    case FKind::BExists: {
      auto inner = m;
      inner.erase(f.symbol());
      Formula body = subst(f.left(), inner);
      if (f.kind() == FKind::Forall) return F::forall(f.symbol(), body);
      if (f.kind() == FKind::Exists) return F::exists(f.symbol(), body);
      Term b = subst_term(f.bound(), m);
      if (f.kind() == FKind::BForall) return F::bforall(f.symbol(), b, body);
      return F::bexists(f.symbol(), b, body);
    }
  }
  return f;
}

}  // namespace

Diagram elementary_diagram(const Structure& s, const EnumOptions& opt) {
  if (opt.max_depth > 3) throw CapExceeded("diagram depth is capped at 3");
  Diagram d;
  d.language = s.language();
  std::vector<std::string> names;
  for (const auto& id : s.universe()) {
    std::string c = element_constant(id);
    if (d.language.has_function(c) || d.language.has_relation(c))
      throw Error("element constant '" + c + "' clashes with a symbol");
    d.language.functions[c] = 0;
    names.push_back(c);
  }
  d.expanded = Structure(d.language, s.universe());
  for (const auto& [r, ar] : s.language().relations)
    for (const auto& t : s.tuples(r)) d.expanded.add_tuple(r, t);
  for (const auto& [fn, ar] : s.language().functions) {
    const auto& tab = s.function_table(fn);
    std::size_t n = s.universe().size();
    for (std::size_t off = 0; off < tab.size(); ++off) {
      std::vector<int> args(ar);
      std::size_t rem = off;
      for (int i = ar - 1; i >= 0; --i) {
        args[i] = static_cast<int>(rem % n);
        rem /= n;
      }
      d.expanded.set_value(fn, args, tab[off]);
    }
  }
  for (int i = 0; i < s.size(); ++i) d.expanded.set_value(names[i], {}, i);

  FormulaTable table = enumerate_table(s.language(), opt);
  MaskTable m = structure_masks(table, s);
  int k = static_cast<int>(table.vars.size());
  AssignmentSpace space(s.size(), k);
  for (std::size_t f = 0; f < table.size(); ++f) {
    std::uint32_t fr = table.nodes[f].free;
    for (std::size_t a = 0; a < space.count; ++a) {
      bool canonical = true;
      for (int i = 0; i < k; ++i)
        if (!((fr >> i) & 1u) && space.value(a, i) != 0) canonical = false;
      if (!canonical) continue;
      std::map<std::string, Term> sub;
      for (int i = 0; i < k; ++i)
        if ((fr >> i) & 1u) sub[table.vars[i]] = Term::constant(names[space.value(a, i)]);
      Formula inst = subst(table.formula(f), sub);
      if (m.get(f, a)) d.sentences.push_back(inst);
      else if (table.nodes[f].depth == 0) d.sentences.push_back(Formula::neg(inst));
    }
  }
  return d;
}

CheckReport is_transitive_submodel(const Structure& m, const Structure& n, const std::string& rel) {
  CheckReport rep("transitive-submodel");
  if (m.language().relations.count(rel) == 0 || n.language().relations.count(rel) == 0 ||
      m.language().relations.at(rel) != 2 || n.language().relations.at(rel) != 2)
    throw Error("membership relation '" + rel + "' must be binary in both structures");
  std::vector<int> emb(m.size());
  for (int i = 0; i < m.size(); ++i) {
    const std::string& id = m.element(i);
    try {
      emb[i] = n.index_of(id);
    } catch (const Error&) {
      rep.fail("not a subset", id + " is missing from the larger model");
      return rep;
    }
  }
  std::vector<char> in_m(n.size(), 0);
  for (int v : emb) in_m[v] = 1;
  for (int a = 0; a < m.size(); ++a)
    for (int b = 0; b < m.size(); ++b)
      if (m.holds(rel, {b, a}) != n.holds(rel, {emb[b], emb[a]}))
        rep.fail("relation not induced", m.element(b) + " " + rel + " " + m.element(a));
  for (int a = 0; a < m.size(); ++a)
    for (int b = 0; b < n.size(); ++b)
      if (n.holds(rel, {b, emb[a]}) && !in_m[b])
        rep.fail("not transitive", n.element(b) + " " + rel + " " + m.element(a));
  return rep;
}

bool is_isomorphism(const Structure& a, const Structure& b, const std::vector<int>& h) {
  if (!(a.language() == b.language()) || a.size() != b.size()) return false;
  if (static_cast<int>(h.size()) != a.size()) return false;
  std::vector<char> hit(b.size(), 0);
  for (int v : h) {
    if (v < 0 || v >= b.size() || hit[v]) return false;
    hit[v] = 1;
  }
  std::size_t n = a.universe().size();
  auto decode = [&](std::size_t off, int ar) {
    std::vector<int> args(ar);
    for (int i = ar - 1; i >= 0; --i) {
      args[i] = static_cast<int>(off % n);
      off /= n;
    }
    return args;
  };
  for (const auto& [r, ar] : a.language().relations) {
    const auto& tab = a.relation_table(r);
    for (std::size_t off = 0; off < tab.size(); ++off) {
      auto args = decode(off, ar);
      for (int& x : args) x = h[x];
      if ((tab[off] != 0) != b.holds(r, args)) return false;
    }
  }
  for (const auto& [f, ar] : a.language().functions) {
    const auto& tab = a.function_table(f);
    for (std::size_t off = 0; off < tab.size(); ++off) {
      auto args = decode(off, ar);
      for (int& x : args) x = h[x];
      if (h[tab[off]] != b.value(f, args)) return false;
    }
  }
  return true;
}

std::optional<std::vector<int>> find_isomorphism(const Structure& a, const Structure& b) {
  if (a.size() > 8 || b.size() > 8) throw CapExceeded("isomorphism search limited to 8 elements");
  if (a.size() != b.size() || !(a.language() == b.language())) return std::nullopt;
  std::vector<int> h(a.size());
  std::iota(h.begin(), h.end(), 0);
  do {
    if (is_isomorphism(a, b, h)) return h;
  } while (std::next_permutation(h.begin(), h.end()));
  return std::nullopt;
}

}  // namespace umt
