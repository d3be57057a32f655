#include <mutex>

#include "umt/error.hpp"
#include "umt/logic.hpp"

namespace umt {

namespace defs {

using F = Formula;

Formula empty(const Term& x, FreshNames& fresh) {
  std::string y = fresh.next("y");
  return F::bforall(y, x, F::neg(F::eq(Term::var(y), Term::var(y))));
}

Formula finite_set(const Term& x, const std::vector<Term>& ys, FreshNames& fresh) {
  if (ys.empty()) return empty(x, fresh);
  std::vector<Formula> parts;
  for (const Term& y : ys) parts.push_back(F::mem(y, x));
  std::string y = fresh.next("y");
  std::vector<Formula> alts;
  for (const Term& t : ys) alts.push_back(F::eq(Term::var(y), t));
  parts.push_back(F::bforall(y, x, F::disj_all(alts)));
  return F::conj_all(parts);
}

Formula pair(const Term& x, const Term& a, const Term& b, FreshNames& fresh) {
  std::string u = fresh.next("u");
  std::string v = fresh.next("v");
  Term tu = Term::var(u), tv = Term::var(v);
  Formula body = F::conj_all({finite_set(x, {tu, tv}, fresh), finite_set(tu, {a}, fresh),
                              finite_set(tv, {a, b}, fresh)});
  return F::bexists(u, x, F::bexists(v, x, body));
}

Formula tuple(const Term& x, const std::vector<Term>& ys, FreshNames& fresh) {
  if (ys.empty()) throw Error("tuple definition needs at least one component");
  if (ys.size() == 1) return F::eq(x, ys[0]);
  if (ys.size() == 2) return pair(x, ys[0], ys[1], fresh);
  // (y1,...,yn) = ((y1,...,y(n-1)), yn); the inner tuple is a member of a
  // member of x.
  std::string s = fresh.next("s");
  std::string w = fresh.next("w");
  Term tw = Term::var(w);
  std::vector<Term> head(ys.begin(), ys.end() - 1);
  Formula body = F::conj(pair(x, tw, ys.back(), fresh), tuple(tw, head, fresh));
  return F::bexists(s, x, F::bexists(w, Term::var(s), body));
}

Formula pair_in(const Term& a, const Term& b, const Term& s, FreshNames& fresh) {
  std::string p = fresh.next("p");
  return F::bexists(p, s, pair(Term::var(p), a, b, fresh));
}

Formula subset(const Term& x, const Term& y, FreshNames& fresh) {
  std::string u = fresh.next("u");
  return F::bforall(u, x, F::mem(Term::var(u), y));
}

Formula product(const Term& x, const Term& y, const Term& z, FreshNames& fresh) {
  std::string u = fresh.next("u"), v = fresh.next("v"), w = fresh.next("w");
  Term tu = Term::var(u), tv = Term::var(v), tw = Term::var(w);
  Formula into =
      F::bforall(u, x, F::bexists(v, y, F::bexists(w, z, pair(tu, tv, tw, fresh))));
  std::string u2 = fresh.next("u"), v2 = fresh.next("v"), w2 = fresh.next("w");
  Formula onto = F::bforall(
      v2, y,
      F::bforall(w2, z,
                 F::bexists(u2, x, pair(Term::var(u2), Term::var(v2), Term::var(w2), fresh))));
  return F::conj(into, onto);
}

Formula exists_unique(const std::string& v, const Term& bound,
                      const std::function<Formula(const Term&)>& body, FreshNames& fresh) {
  std::string z = fresh.next("z");
  Formula unique =
      F::bforall(z, bound, F::implies(body(Term::var(z)), F::eq(Term::var(z), Term::var(v))));
  return F::bexists(v, bound, F::conj(body(Term::var(v)), unique));
}

Formula function(const Term& f, const Term& a, const Term& b, FreshNames& fresh) {
  std::string u = fresh.next("u"), v = fresh.next("v"), w = fresh.next("w");
  Formula graph = F::bforall(
      u, f,
      F::bexists(v, a, F::bexists(w, b, pair(Term::var(u), Term::var(v), Term::var(w), fresh))));
  std::string v2 = fresh.next("v");
  std::string w2 = fresh.next("w");
  Term tv2 = Term::var(v2);
  auto has_value = [&](const Term& wt) {
    std::string u2 = fresh.next("u");
    return F::bexists(u2, f, pair(Term::var(u2), tv2, wt, fresh));
  };
  return F::conj(graph, F::bforall(v2, a, exists_unique(w2, b, has_value, fresh)));
}

Formula vn_member(int n, const Term& x, const Term& y, FreshNames& fresh) {
  if (n < 0) throw Error("level must be non-negative");
  if (n == 0) return F::mem(y, x);
  std::string z = fresh.next("z");
  return F::disj(F::mem(y, x), F::bforall(z, y, vn_member(n - 1, x, Term::var(z), fresh)));
}

Formula vn_set(int n, const Term& x, const Term& y, FreshNames& fresh) {
  return F::conj(vn_member(n, x, y, fresh), F::neg(F::mem(y, x)));
}

Formula nu(int n, const Term& y, const Term& x, FreshNames& fresh) {
  if (n < 0) throw Error("level must be non-negative");
  if (n == 0) return F::mem(y, x);
  Formula prev = nu(n - 1, y, x, fresh);
  std::string z = fresh.next("z");
  return F::disj(prev, F::bforall(z, y, nu(n - 1, Term::var(z), x, fresh)));
}

Formula base(const Term& x, FreshNames& fresh) {
  std::string y = fresh.next("y");
  std::string z = fresh.next("z");
  return F::bforall(y, x, F::bforall(z, Term::var(y), F::neg(F::eq(Term::var(z), Term::var(z)))));
}

}  // namespace defs

PhiKind phi_kind_from_string(const std::string& s) {
  if (s == "empty") return PhiKind::Empty;
  if (s == "finite-set") return PhiKind::FiniteSet;
  if (s == "tuple") return PhiKind::Tuple;
  if (s == "subset") return PhiKind::Subset;
  if (s == "product") return PhiKind::Product;
  if (s == "function") return PhiKind::Function;
  if (s == "vn-member") return PhiKind::VnMember;
  if (s == "vn-set") return PhiKind::VnSet;
  throw Error("unknown definition kind '" + s + "'");
}

std::string phi_kind_name(PhiKind k) {
  switch (k) {
    case PhiKind::Empty: return "empty";
    case PhiKind::FiniteSet: return "finite-set";
    case PhiKind::Tuple: return "tuple";
    case PhiKind::Subset: return "subset";
    case PhiKind::Product: return "product";
    case PhiKind::Function: return "function";
    case PhiKind::VnMember: return "vn-member";
    case PhiKind::VnSet: return "vn-set";
  }
  return "?";
}

std::vector<std::string> phi_arguments(PhiKind kind, int n) {
  switch (kind) {
    case PhiKind::Empty:
      return {"x"};
    case PhiKind::FiniteSet:
    case PhiKind::Tuple: {
      std::vector<std::string> out{"x"};
      for (int i = 1; i <= n; ++i) out.push_back("y" + std::to_string(i));
      return out;
    }
    case PhiKind::Subset:
    case PhiKind::VnMember:
    case PhiKind::VnSet:
      return {"x", "y"};
    case PhiKind::Product:
    case PhiKind::Function:
      return {"x", "y", "z"};
  }
  return {};
}

Formula build_phi(PhiKind kind, int n) {
  if ((kind == PhiKind::FiniteSet || kind == PhiKind::Tuple) && n < 1)
    throw Error(phi_kind_name(kind) + " needs n >= 1");
  if ((kind == PhiKind::VnMember || kind == PhiKind::VnSet) && n < 0)
    throw Error(phi_kind_name(kind) + " needs n >= 0");

  static std::mutex mu;
  static std::map<std::pair<int, int>, Formula> memo;
  std::pair<int, int> key{static_cast<int>(kind), n};
  {
    std::lock_guard lock(mu);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
  }

  std::vector<std::string> names = phi_arguments(kind, n);
  FreshNames fresh(std::set<std::string>(names.begin(), names.end()));
  std::vector<Term> args;
  for (const auto& s : names) args.push_back(Term::var(s));
  std::vector<Term> rest(args.begin() + 1, args.end());

  Formula out;
  switch (kind) {
    case PhiKind::Empty: out = defs::empty(args[0], fresh); break;
    case PhiKind::FiniteSet: out = defs::finite_set(args[0], rest, fresh); break;
    case PhiKind::Tuple: out = defs::tuple(args[0], rest, fresh); break;
    case PhiKind::Subset: out = defs::subset(args[0], args[1], fresh); break;
    case PhiKind::Product: out = defs::product(args[0], args[1], args[2], fresh); break;
    case PhiKind::Function: out = defs::function(args[0], args[1], args[2], fresh); break;
    case PhiKind::VnMember: out = defs::vn_member(n, args[0], args[1], fresh); break;
    case PhiKind::VnSet: out = defs::vn_set(n, args[0], args[1], fresh); break;
  }
  std::lock_guard lock(mu);
  memo.emplace(key, out);
  return out;
}

Formula build_nu(int n) {
  FreshNames fresh({"x", "y"});
  return defs::nu(n, Term::var("y"), Term::var("x"), fresh);
}

Formula build_base() {
  FreshNames fresh({"x"});
  return defs::base(Term::var("x"), fresh);
}

Formula build_psi_hyperfinite() {
  static const Formula cached = [] {
    FreshNames fresh({"A", "f", "n", "N", "Lt", "PN"});
    Term A = Term::var("A"), f = Term::var("f"), n = Term::var("n");
    Term N = Term::var("N"), Lt = Term::var("Lt"), PN = Term::var("PN");
    std::string U = fresh.next("U");
    Term tU = Term::var(U);
    using F = Formula;

    // U is the initial segment {m in N : m < n}.
    std::string m = fresh.next("m");
    Term tm = Term::var(m);
    Formula less = defs::pair_in(tm, n, Lt, fresh);
    Formula segment = F::conj(defs::subset(tU, N, fresh),
                              F::bforall(m, N, F::iff(less, F::mem(tm, tU))));

    std::string x = fresh.next("x"), u1 = fresh.next("u"), a1 = fresh.next("a");
    Formula graph = F::bforall(
        x, f, F::bexists(u1, tU, F::bexists(a1, A, defs::pair(Term::var(x), Term::var(u1),
                                                               Term::var(a1), fresh))));

    std::string u2 = fresh.next("u"), a2 = fresh.next("a");
    Formula total = F::bforall(
        u2, tU, F::bexists(a2, A, defs::pair_in(Term::var(u2), Term::var(a2), f, fresh)));

    std::string a3 = fresh.next("a"), u3 = fresh.next("u");
    Formula onto = F::bforall(
        a3, A, F::bexists(u3, tU, defs::pair_in(Term::var(u3), Term::var(a3), f, fresh)));

    std::string u4 = fresh.next("u"), a4 = fresh.next("a"), b4 = fresh.next("b");
    Term tu4 = Term::var(u4), ta4 = Term::var(a4), tb4 = Term::var(b4);
    Formula functional = F::bforall(
        u4, tU,
        F::bforall(a4, A,
                   F::bforall(b4, A,
                              F::implies(F::conj(defs::pair_in(tu4, ta4, f, fresh),
                                                 defs::pair_in(tu4, tb4, f, fresh)),
                                         F::eq(ta4, tb4)))));

    std::string u5 = fresh.next("u"), v5 = fresh.next("v"), a5 = fresh.next("a");
    Term tu5 = Term::var(u5), tv5 = Term::var(v5), ta5 = Term::var(a5);
    Formula injective = F::bforall(
        u5, tU,
        F::bforall(v5, tU,
                   F::implies(F::bexists(a5, A,
                                         F::conj(defs::pair_in(tu5, ta5, f, fresh),
                                                 defs::pair_in(tv5, ta5, f, fresh))),
                              F::eq(tu5, tv5))));

    return F::bexists(U, PN, F::conj_all({segment, graph, total, onto, functional, injective}));
  }();
  return cached;
}

}  // namespace umt
