#include "umt/enumeration.hpp"

#include <algorithm>
#include <bit>
#include <random>

#include "umt/error.hpp"

namespace umt {

namespace {

std::uint32_t term_free(const Term& t, const std::vector<std::string>& vars) {
  std::uint32_t m = 0;
  if (t.kind == Term::Kind::Var) {
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i] == t.name) m |= 1u << i;
  }
  for (const Term& a : t.args) m |= term_free(a, vars);
  return m;
}

std::uint32_t atom_free(const Formula& f, const std::vector<std::string>& vars) {
  std::uint32_t m = 0;
  for (const Term& t : f.terms()) m |= term_free(t, vars);
  return m;
}

void check_vars(const EnumOptions& opt) {
  if (opt.vars.empty() || opt.vars.size() > 8) throw Error("enumeration needs 1..8 variables");
  if (opt.max_depth < 0) throw Error("negative depth");
  if (opt.max_depth > 255) throw Error("depth too large");
}

// Appends the Not, And and quantifier nodes of one depth level.
void add_level(FormulaTable& t, int d, bool bounded, const EnumOptions& opt) {
  std::size_t lo = d >= 2 ? t.level_end[d - 2] : 0;
  std::size_t hi = t.level_end[d - 1];
  std::size_t prev_start = lo;  // first node of depth d-1
  std::size_t prev_end = hi;
  auto push = [&](EnumNode n) {
    n.depth = static_cast<std::uint8_t>(d);
    t.nodes.push_back(n);
  };

  for (std::size_t i = prev_start; i < prev_end; ++i) {
    EnumNode n;
    n.op = EnumNode::Not;
    n.a = static_cast<std::int32_t>(i);
    n.free = t.nodes[i].free;
    push(n);
  }

  // Pairs (i, j) with i < j and j of depth d-1, enumerated j-major.
  std::uint64_t s = prev_start, e = prev_end;
  std::uint64_t total = 0;
  if (e > s) total = (e - s) * (s + e - 1) / 2;
  bool top = d == opt.max_depth;
  auto push_and = [&](std::uint64_t i, std::uint64_t j) {
    EnumNode n;
    n.op = EnumNode::And;
    n.a = static_cast<std::int32_t>(i);
    n.b = static_cast<std::int32_t>(j);
    n.free = t.nodes[i].free | t.nodes[j].free;
    push(n);
  };
  if (top && total > opt.and_budget) {
    t.sampled = true;
    t.top_and_total = total;
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::uint64_t> dist(0, total - 1);
    std::vector<std::uint64_t> picks;
    picks.reserve(opt.and_budget);
    for (std::uint64_t k = 0; k < opt.and_budget; ++k) picks.push_back(dist(rng));
    std::sort(picks.begin(), picks.end());
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
    t.top_and_kept = picks.size();
    // offset(j) = number of pairs with second index < j.
    auto offset = [&](std::uint64_t j) { return (j - s) * (s + j - 1) / 2; };
    std::uint64_t j = s;
    for (std::uint64_t r : picks) {
      while (j + 1 < e && offset(j + 1) <= r) ++j;
      push_and(r - offset(j), j);
    }
  } else {
    if (top) {
      t.top_and_total = total;
      t.top_and_kept = total;
    }
    if (t.nodes.size() + total > (1ull << 31)) throw CapExceeded("formula enumeration too large");
    for (std::uint64_t j = s; j < e; ++j)
      for (std::uint64_t i = 0; i < j; ++i) push_and(i, j);
  }

  int k = static_cast<int>(t.vars.size());
  for (int v = 0; v < k; ++v) {
    if (bounded) {
      for (int w = 0; w < k; ++w) {
        if (w == v) continue;
        for (std::size_t i = prev_start; i < prev_end; ++i) {
          EnumNode n;
          n.op = EnumNode::BForall;
          n.var = static_cast<std::uint8_t>(v);
          n.bound = static_cast<std::uint8_t>(w);
          n.a = static_cast<std::int32_t>(i);
          n.free = (t.nodes[i].free & ~(1u << v)) | (1u << w);
          push(n);
        }
      }
    } else {
      for (std::size_t i = prev_start; i < prev_end; ++i) {
        EnumNode n;
        n.op = EnumNode::Forall;
        n.var = static_cast<std::uint8_t>(v);
        n.a = static_cast<std::int32_t>(i);
        n.free = t.nodes[i].free & ~(1u << v);
        push(n);
      }
    }
  }
  t.level_end.push_back(t.nodes.size());
}

FormulaTable build(std::vector<Formula> atoms, bool bounded, const EnumOptions& opt) {
  FormulaTable t;
  t.vars = opt.vars;
  t.atoms = std::move(atoms);
  for (std::size_t i = 0; i < t.atoms.size(); ++i) {
    EnumNode n;
    n.op = EnumNode::Atom;
    n.a = static_cast<std::int32_t>(i);
    n.free = atom_free(t.atoms[i], t.vars);
    t.nodes.push_back(n);
  }
  t.level_end.push_back(t.nodes.size());
  for (int d = 1; d <= opt.max_depth; ++d) add_level(t, d, bounded, opt);
  return t;
}

}  // namespace

FormulaTable enumerate_table(const Language& lang, const EnumOptions& opt) {
  check_vars(opt);
  lang.validate();
  std::vector<Term> base;
  for (const auto& v : opt.vars) base.push_back(Term::var(v));
  for (const auto& [name, arity] : lang.functions)
    if (arity == 0) base.push_back(Term::constant(name));
  std::vector<Term> terms = base;
  for (const auto& [name, arity] : lang.functions) {
    if (arity == 0) continue;
    std::vector<std::size_t> idx(arity, 0);
    while (true) {
      std::vector<Term> args;
      for (std::size_t i : idx) args.push_back(base[i]);
      terms.push_back(Term::apply(name, std::move(args)));
      int p = arity - 1;
      while (p >= 0 && ++idx[p] == base.size()) idx[p--] = 0;
      if (p < 0) break;
    }
  }
  std::vector<Formula> atoms;
  for (const auto& [name, arity] : lang.relations) {
    std::vector<std::size_t> idx(arity, 0);
    while (true) {
      std::vector<Term> args;
      for (std::size_t i : idx) args.push_back(terms[i]);
      atoms.push_back(Formula::rel(name, std::move(args)));
      int p = arity - 1;
      while (p >= 0 && ++idx[p] == terms.size()) idx[p--] = 0;
      if (p < 0) break;
    }
  }
  for (const Term& a : terms)
    for (const Term& b : terms) atoms.push_back(Formula::eq(a, b));
  return build(std::move(atoms), false, opt);
}

FormulaTable enumerate_bounded_table(const EnumOptions& opt) {
  check_vars(opt);
  std::vector<Formula> atoms;
  for (const auto& a : opt.vars)
    for (const auto& b : opt.vars) atoms.push_back(Formula::eq(Term::var(a), Term::var(b)));
  for (const auto& a : opt.vars)
    for (const auto& b : opt.vars) atoms.push_back(Formula::mem(Term::var(a), Term::var(b)));
  return build(std::move(atoms), true, opt);
}

Formula FormulaTable::formula(std::size_t i) const {
  const EnumNode& n = nodes.at(i);
  switch (n.op) {
    case EnumNode::Atom:
      return atoms[n.a];
    case EnumNode::Not:
      return Formula::neg(formula(n.a));
    case EnumNode::And:
      return Formula::conj(formula(n.a), formula(n.b));
    case EnumNode::Forall:
      return Formula::forall(vars[n.var], formula(n.a));
    case EnumNode::BForall:
      return Formula::bforall(vars[n.var], Term::var(vars[n.bound]), formula(n.a));
  }
  return {};
}

int FormulaTable::free_count(std::size_t i) const { return std::popcount(nodes[i].free); }

AssignmentSpace::AssignmentSpace(int n_, int k_) : n(n_), k(k_) {
  stride.resize(k);
  count = 1;
  for (int i = 0; i < k; ++i) {
    stride[i] = count;
    if (n > 0 && count > (std::size_t(1) << 40) / static_cast<std::size_t>(n))
      throw CapExceeded("assignment space too large");
    count *= static_cast<std::size_t>(n);
  }
}

std::size_t AssignmentSpace::encode(const std::vector<int>& vals) const {
  std::size_t s = 0;
  for (int i = 0; i < k; ++i) s += static_cast<std::size_t>(vals[i]) * stride[i];
  return s;
}

MaskTable evaluate_table(const FormulaTable& table, int domain_size, const AtomFiller& atoms,
                         const std::vector<std::vector<int>>* members) {
  AssignmentSpace space(domain_size, static_cast<int>(table.vars.size()));
  MaskTable m(table.size(), space.count);
  std::size_t W = m.words();
  std::size_t tail_bits = space.count % 64;
  std::uint64_t tail_mask = tail_bits ? ((1ull << tail_bits) - 1) : ~0ull;
  for (std::size_t f = 0; f < table.size(); ++f) {
    const EnumNode& n = table.nodes[f];
    switch (n.op) {
      case EnumNode::Atom:
        atoms(static_cast<std::size_t>(n.a), space, m, f);
        break;
      case EnumNode::Not: {
        const std::uint64_t* src = m.row(n.a);
        std::uint64_t* dst = m.row(f);
        for (std::size_t w = 0; w < W; ++w) dst[w] = ~src[w];
        if (W) dst[W - 1] &= tail_mask;
        break;
      }
      case EnumNode::And: {
        const std::uint64_t* x = m.row(n.a);
        const std::uint64_t* y = m.row(n.b);
        std::uint64_t* dst = m.row(f);
        for (std::size_t w = 0; w < W; ++w) dst[w] = x[w] & y[w];
        break;
      }
      case EnumNode::Forall: {
        std::size_t st = space.stride[n.var];
        for (std::size_t s = 0; s < space.count; ++s) {
          if (space.value(s, n.var) != 0) continue;
          bool all = true;
          for (int d = 0; d < domain_size && all; ++d) all = m.get(n.a, s + d * st);
          if (all)
            for (int d = 0; d < domain_size; ++d) m.set(f, s + d * st);
        }
        break;
      }
      case EnumNode::BForall: {
        if (!members) throw Error("bounded quantifier needs a membership relation");
        for (std::size_t s = 0; s < space.count; ++s) {
          int e = space.value(s, n.bound);
          bool all = true;
          for (int d : (*members)[e]) {
            if (!m.get(n.a, space.with(s, n.var, d))) {
              all = false;
              break;
            }
          }
          if (all) m.set(f, s);
        }
        break;
      }
    }
  }
  return m;
}

}  // namespace umt
