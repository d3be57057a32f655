#include <algorithm>

#include "umt/error.hpp"
#include "umt/logic.hpp"

namespace umt {

void Language::validate() const {
  for (const auto& [name, arity] : relations) {
    if (functions.count(name)) throw Error("symbol '" + name + "' is both relation and function");
    if (arity < 0) throw Error("negative arity for '" + name + "'");
  }
  for (const auto& [name, arity] : functions)
    if (arity < 0) throw Error("negative arity for '" + name + "'");
}

bool Term::operator==(const Term& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Var:
    case Kind::Const:
      return name == o.name;
    case Kind::Apply:
      return name == o.name && args == o.args;
    case Kind::Entity:
      return entity == o.entity;
  }
  return false;
}

#define UMT_MAKE(...) Formula(std::make_shared<const FormulaNode>(FormulaNode{__VA_ARGS__}))

Formula Formula::eq(Term a, Term b) {
  return UMT_MAKE(FKind::Eq, {}, {std::move(a), std::move(b)}, {}, {}, {});
}
Formula Formula::rel(std::string r, std::vector<Term> args) {
  return UMT_MAKE(FKind::Rel, std::move(r), std::move(args), {}, {}, {});
}
Formula Formula::mem(Term a, Term b) {
  return UMT_MAKE(FKind::Mem, {}, {std::move(a), std::move(b)}, {}, {}, {});
}
Formula Formula::neg(Formula f) { return UMT_MAKE(FKind::Not, {}, {}, {}, std::move(f), {}); }
Formula Formula::conj(Formula a, Formula b) {
  return UMT_MAKE(FKind::And, {}, {}, {}, std::move(a), std::move(b));
}
Formula Formula::disj(Formula a, Formula b) {
  return UMT_MAKE(FKind::Or, {}, {}, {}, std::move(a), std::move(b));
}
Formula Formula::implies(Formula a, Formula b) {
  return UMT_MAKE(FKind::Implies, {}, {}, {}, std::move(a), std::move(b));
}
Formula Formula::iff(Formula a, Formula b) {
  return UMT_MAKE(FKind::Iff, {}, {}, {}, std::move(a), std::move(b));
}
Formula Formula::forall(std::string v, Formula body) {
  return UMT_MAKE(FKind::Forall, std::move(v), {}, {}, std::move(body), {});
}
Formula Formula::exists(std::string v, Formula body) {
  return UMT_MAKE(FKind::Exists, std::move(v), {}, {}, std::move(body), {});
}
Formula Formula::bforall(std::string v, Term bound, Formula body) {
  return UMT_MAKE(FKind::BForall, std::move(v), {}, std::move(bound), std::move(body), {});
}
Formula Formula::bexists(std::string v, Term bound, Formula body) {
  return UMT_MAKE(FKind::BExists, std::move(v), {}, std::move(bound), std::move(body), {});
}
#undef UMT_MAKE

Formula Formula::conj_all(const std::vector<Formula>& parts) {
  if (parts.empty()) throw Error("empty conjunction");
  Formula acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = conj(acc, parts[i]);
  return acc;
}

Formula Formula::disj_all(const std::vector<Formula>& parts) {
  if (parts.empty()) throw Error("empty disjunction");
  Formula acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = disj(acc, parts[i]);
  return acc;
}

FKind Formula::kind() const { return node_->kind; }
const std::string& Formula::symbol() const { return node_->symbol; }
const std::vector<Term>& Formula::terms() const { return node_->terms; }
const Term& Formula::bound() const { return node_->bound; }
const Formula& Formula::left() const { return node_->a; }
const Formula& Formula::right() const { return node_->b; }

bool Formula::is_atomic() const {
  FKind k = kind();
  return k == FKind::Eq || k == FKind::Rel || k == FKind::Mem;
}

bool Formula::operator==(const Formula& o) const {
  if (node_ == o.node_) return true;
  if (!node_ || !o.node_) return false;
  const FormulaNode& x = *node_;
  const FormulaNode& y = *o.node_;
  if (x.kind != y.kind || x.symbol != y.symbol || x.terms != y.terms) return false;
  if ((x.kind == FKind::BForall || x.kind == FKind::BExists) && x.bound != y.bound)
    return false;
  return x.a == y.a && x.b == y.b;
}

Formula normalize(const Formula& f) {
  using F = Formula;
  switch (f.kind()) {
    case FKind::Eq:
    case FKind::Rel:
    case FKind::Mem:
      return f;
    case FKind::Not:
      return F::neg(normalize(f.left()));
    case FKind::And:
      return F::conj(normalize(f.left()), normalize(f.right()));
    case FKind::Or:
      return F::neg(F::conj(F::neg(normalize(f.left())), F::neg(normalize(f.right()))));
    case FKind::Implies:
      // a -> b abbreviates (not a) or b.
      return normalize(F::disj(F::neg(f.left()), f.right()));
    case FKind::Iff:
      return F::conj(normalize(F::implies(f.left(), f.right())),
                     normalize(F::implies(f.right(), f.left())));
    case FKind::Forall:
      return F::forall(f.symbol(), normalize(f.left()));
    case FKind::Exists:
      return F::neg(F::forall(f.symbol(), F::neg(normalize(f.left()))));
    case FKind::BForall:
      return F::bforall(f.symbol(), f.bound(), normalize(f.left()));
    case FKind::BExists:
      return F::neg(F::bforall(f.symbol(), f.bound(), F::neg(normalize(f.left()))));
  }
  return f;
}

namespace {

int core_depth(const Formula& f) {
  switch (f.kind()) {
    case FKind::Not:
    case FKind::Forall:
    case FKind::BForall:
      return 1 + core_depth(f.left());
    case FKind::And:
      return 1 + std::max(core_depth(f.left()), core_depth(f.right()));
    default:
      return 0;
  }
}

void collect_term_vars(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Var) out.insert(t.name);
  for (const Term& a : t.args) collect_term_vars(a, out);
}

void collect_free(const Formula& f, std::set<std::string>& out) {
  switch (f.kind()) {
    case FKind::Eq:
    case FKind::Rel:
    case FKind::Mem:
      for (const Term& t : f.terms()) collect_term_vars(t, out);
      return;
    case FKind::Not:
      collect_free(f.left(), out);
      return;
    case FKind::And:
    case FKind::Or:
    case FKind::Implies:
    case FKind::Iff:
      collect_free(f.left(), out);
      collect_free(f.right(), out);
      return;
    case FKind::Forall:
    case FKind::Exists:
    case FKind::BForall:
    case FKind::BExists: {
      std::set<std::string> inner;
      collect_free(f.left(), inner);
      inner.erase(f.symbol());
      out.insert(inner.begin(), inner.end());
      if (f.kind() == FKind::BForall || f.kind() == FKind::BExists)
        collect_term_vars(f.bound(), out);
      return;
    }
  }
}

void collect_all(const Formula& f, std::set<std::string>& out) {
  if (f.is_atomic()) {
    for (const Term& t : f.terms()) collect_term_vars(t, out);
    return;
  }
  switch (f.kind()) {
    case FKind::Forall:
    case FKind::Exists:
      out.insert(f.symbol());
      break;
    case FKind::BForall:
    case FKind::BExists:
      out.insert(f.symbol());
      collect_term_vars(f.bound(), out);
      break;
    default:
      break;
  }
  if (f.left().valid()) collect_all(f.left(), out);
  if (f.right().valid()) collect_all(f.right(), out);
}

Term map_term(const Term& t, const std::map<Entity, Entity>& m) {
  switch (t.kind) {
    case Term::Kind::Entity: {
      auto it = m.find(t.entity);
      if (it == m.end())
        throw PreconditionError("unmapped entity constant", "C_{" + t.entity.str() + "}");
      return Term::of(it->second);
    }
    case Term::Kind::Apply: {
      std::vector<Term> args;
      for (const Term& a : t.args) args.push_back(map_term(a, m));
      return Term::apply(t.name, std::move(args));
    }
    default:
      return t;
  }
}

void collect_entities(const Term& t, std::set<Entity>& out) {
  if (t.kind == Term::Kind::Entity) out.insert(t.entity);
  for (const Term& a : t.args) collect_entities(a, out);
}

bool term_uses_symbols(const Term& t) {
  return t.kind == Term::Kind::Const || t.kind == Term::Kind::Apply;
}

}  // namespace

int depth(const Formula& f) { return core_depth(normalize(f)); }

bool is_bounded(const Formula& f) {
  switch (f.kind()) {
    case FKind::Forall:
    case FKind::Exists:
      return false;
    case FKind::Eq:
    case FKind::Rel:
    case FKind::Mem:
      return true;
    default:
      return (!f.left().valid() || is_bounded(f.left())) &&
             (!f.right().valid() || is_bounded(f.right()));
  }
}

std::set<std::string> free_variables(const Formula& f) {
  std::set<std::string> out;
  collect_free(f, out);
  return out;
}

std::set<std::string> term_variables(const Term& t) {
  std::set<std::string> out;
  collect_term_vars(t, out);
  return out;
}

std::set<std::string> all_variables(const Formula& f) {
  std::set<std::string> out;
  collect_all(f, out);
  return out;
}

bool uses_symbols(const Formula& f) {
  if (f.kind() == FKind::Rel) return true;
  if (f.is_atomic()) {
    for (const Term& t : f.terms())
      if (term_uses_symbols(t)) return true;
    return false;
  }
  if ((f.kind() == FKind::BForall || f.kind() == FKind::BExists) &&
      term_uses_symbols(f.bound()))
    return true;
  return (f.left().valid() && uses_symbols(f.left())) ||
         (f.right().valid() && uses_symbols(f.right()));
}

Formula star_transform(const Formula& f, const std::map<Entity, Entity>& map) {
  using F = Formula;
  switch (f.kind()) {
    case FKind::Eq:
      return F::eq(map_term(f.terms()[0], map), map_term(f.terms()[1], map));
    case FKind::Mem:
      return F::mem(map_term(f.terms()[0], map), map_term(f.terms()[1], map));
    case FKind::Rel: {
      std::vector<Term> args;
      for (const Term& t : f.terms()) args.push_back(map_term(t, map));
      return F::rel(f.symbol(), std::move(args));
    }
    case FKind::Not:
      return F::neg(star_transform(f.left(), map));
    case FKind::And:
      return F::conj(star_transform(f.left(), map), star_transform(f.right(), map));
    case FKind::Or:
      return F::disj(star_transform(f.left(), map), star_transform(f.right(), map));
    case FKind::Implies:
      return F::implies(star_transform(f.left(), map), star_transform(f.right(), map));
    case FKind::Iff:
      return F::iff(star_transform(f.left(), map), star_transform(f.right(), map));
    case FKind::Forall:
      return F::forall(f.symbol(), star_transform(f.left(), map));
    case FKind::Exists:
      return F::exists(f.symbol(), star_transform(f.left(), map));
    case FKind::BForall:
      return F::bforall(f.symbol(), map_term(f.bound(), map), star_transform(f.left(), map));
    case FKind::BExists:
      return F::bexists(f.symbol(), map_term(f.bound(), map), star_transform(f.left(), map));
  }
  return f;
}

std::set<Entity> entity_constants(const Formula& f) {
  std::set<Entity> out;
  if (f.is_atomic()) {
    for (const Term& t : f.terms()) collect_entities(t, out);
    return out;
  }
  if (f.kind() == FKind::BForall || f.kind() == FKind::BExists)
    collect_entities(f.bound(), out);
  for (const Formula* c : {&f.left(), &f.right()}) {
    if (!c->valid()) continue;
    auto sub = entity_constants(*c);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

std::string FreshNames::next(const std::string& hint) {
  if (!used_.count(hint)) {
    used_.insert(hint);
    return hint;
  }
  for (int i = 1;; ++i) {
    std::string cand = hint + std::to_string(i);
    if (!used_.count(cand)) {
      used_.insert(cand);
      return cand;
    }
  }
}

}  // namespace umt
