#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "umt/entity.hpp"

namespace umt {

// First-order signature. Names are unique across relations and functions;
// 0-ary functions are constants.
struct Language {
  std::map<std::string, int> relations;
  std::map<std::string, int> functions;

  void validate() const;
  bool has_relation(const std::string& n) const { return relations.count(n) > 0; }
  bool has_function(const std::string& n) const { return functions.count(n) > 0; }
  bool operator==(const Language& o) const {
    return relations == o.relations && functions == o.functions;
  }
};

struct Term {
  enum class Kind { Var, Const, Apply, Entity };
  Kind kind = Kind::Var;
  std::string name;  // variable, constant or function symbol
  std::vector<Term> args;
  umt::Entity entity;

  static Term var(std::string n) { return Term{Kind::Var, std::move(n), {}, {}}; }
  static Term constant(std::string n) { return Term{Kind::Const, std::move(n), {}, {}}; }
  static Term apply(std::string f, std::vector<Term> a) {
    return Term{Kind::Apply, std::move(f), std::move(a), {}};
  }
  static Term of(umt::Entity e) { return Term{Kind::Entity, {}, {}, e}; }

  bool operator==(const Term& o) const;
  bool operator!=(const Term& o) const { return !(*this == o); }
};

enum class FKind {
  Eq, Rel, Mem,
  Not, And, Or, Implies, Iff,
  Forall, Exists, BForall, BExists
};

struct FormulaNode;

// Immutable formula tree with shared subterms.
class Formula {
 public:
  Formula() = default;

  static Formula eq(Term a, Term b);
  static Formula rel(std::string r, std::vector<Term> args);
  static Formula mem(Term a, Term b);
  static Formula neg(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula implies(Formula a, Formula b);
  static Formula iff(Formula a, Formula b);
  static Formula forall(std::string v, Formula body);
  static Formula exists(std::string v, Formula body);
  static Formula bforall(std::string v, Term bound, Formula body);
  static Formula bexists(std::string v, Term bound, Formula body);
  // Left-nested conjunction/disjunction of a nonempty list.
  static Formula conj_all(const std::vector<Formula>& parts);
  static Formula disj_all(const std::vector<Formula>& parts);

  bool valid() const { return node_ != nullptr; }
  FKind kind() const;
  const std::string& symbol() const;  // relation name or bound variable
  const std::vector<Term>& terms() const;
  const Term& bound() const;
  const Formula& left() const;   // Not/quantifier body, or left operand
  const Formula& right() const;

  bool is_atomic() const;
  bool operator==(const Formula& o) const;
  bool operator!=(const Formula& o) const { return !(*this == o); }

 private:
  explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const FormulaNode> node_;
};

struct FormulaNode {
  FKind kind;
  std::string symbol;
  std::vector<Term> terms;
  Term bound;
  Formula a, b;
};

// Parsing and printing.
Formula parse_formula(const std::string& text, const Language& lang = {});
Term parse_term(const std::string& text, const Language& lang = {});
std::string to_string(const Formula& f);
std::string to_string(const Term& t);

// Rewrites Or, Implies, Iff, Exists and bounded Exists into the core
// {Not, And, Forall, bounded Forall}.
Formula normalize(const Formula& f);
// Nesting count of Not/And/Forall (bounded or not) after normalization.
int depth(const Formula& f);
bool is_bounded(const Formula& f);
// The bound term of a bounded quantifier is outside the quantifier's scope,
// so its variables count as free.
std::set<std::string> free_variables(const Formula& f);
std::set<std::string> term_variables(const Term& t);
// All variable names occurring anywhere, bound or free.
std::set<std::string> all_variables(const Formula& f);
bool uses_symbols(const Formula& f);

// Replaces every entity constant through the map; throws on an unmapped one.
Formula star_transform(const Formula& f, const std::map<Entity, Entity>& map);
std::set<Entity> entity_constants(const Formula& f);

// Fresh variable names, never reusing a reserved or previously issued name.
class FreshNames {
 public:
  explicit FreshNames(std::set<std::string> reserved = {}) : used_(std::move(reserved)) {}
  std::string next(const std::string& hint);
  void reserve(const std::string& n) { used_.insert(n); }

 private:
  std::set<std::string> used_;
};

// Bounded definitions of set-theoretic predicates. Each builder instantiates
// the definition at the given argument terms.
namespace defs {
Formula empty(const Term& x, FreshNames& fresh);
Formula finite_set(const Term& x, const std::vector<Term>& ys, FreshNames& fresh);
Formula tuple(const Term& x, const std::vector<Term>& ys, FreshNames& fresh);
Formula pair(const Term& x, const Term& a, const Term& b, FreshNames& fresh);
Formula subset(const Term& x, const Term& y, FreshNames& fresh);
Formula product(const Term& x, const Term& y, const Term& z, FreshNames& fresh);
Formula function(const Term& f, const Term& a, const Term& b, FreshNames& fresh);
Formula vn_member(int n, const Term& x, const Term& y, FreshNames& fresh);
Formula vn_set(int n, const Term& x, const Term& y, FreshNames& fresh);
Formula nu(int n, const Term& y, const Term& x, FreshNames& fresh);
Formula base(const Term& x, FreshNames& fresh);
// (a,b) in s, written without naming the pair.
Formula pair_in(const Term& a, const Term& b, const Term& s, FreshNames& fresh);
// exists! v in bound . body(v)
Formula exists_unique(const std::string& v, const Term& bound,
                      const std::function<Formula(const Term&)>& body, FreshNames& fresh);
}  // namespace defs

enum class PhiKind { Empty, FiniteSet, Tuple, Subset, Product, Function, VnMember, VnSet };

PhiKind phi_kind_from_string(const std::string& s);
std::string phi_kind_name(PhiKind k);

// Canonical instances with free variables x (first argument) and y, y1..yn,
// z as documented per kind. Results for Tuple are memoized.
Formula build_phi(PhiKind kind, int n = 0);
std::vector<std::string> phi_arguments(PhiKind kind, int n = 0);

Formula build_nu(int n);    // free variables y, x
Formula build_base();       // free variable x
// Hyperfinite certificate with free variables A, f, n and the finite number
// parameters N (a prefix of the naturals), Lt (its order as a set of pairs)
// and PN (the power set of N).
Formula build_psi_hyperfinite();

}  // namespace umt
