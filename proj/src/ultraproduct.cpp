#include "umt/ultraproduct.hpp"

#include <algorithm>
#include <bit>

#include "umt/error.hpp"

namespace umt {

namespace {

constexpr std::size_t kMaxClasses = 4096;
constexpr std::size_t kMaxChoices = 4096;

std::vector<int> kernel_positions(Mask kernel, int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if ((kernel >> i) & 1u) out.push_back(i);
  return out;
}

template <class Contains>
ReducedProduct build(const std::vector<Structure>& family, const IndexSet& index, Mask kernel,
                     Contains contains) {
  if (family.empty()) throw Error("empty family");
  if (static_cast<int>(family.size()) != index.size())
    throw Error("family size differs from the index set");
  const Language& lang = family.front().language();
  for (const auto& s : family) {
    if (!(s.language() == lang)) throw Error("factors have different languages");
    s.validate();
  }
  ReducedProduct p;
  p.index = index;
  p.kernel = kernel;
  for (const auto& s : family) p.factor_sizes.push_back(s.size());
  std::vector<int> pos = kernel_positions(kernel, index.size());
  std::size_t classes = 1;
  for (int i : pos) {
    classes *= static_cast<std::size_t>(family[i].size());
    if (classes > kMaxClasses) throw CapExceeded("product has too many classes");
  }
  std::vector<std::string> ids;
  for (std::size_t c = 0; c < classes; ++c) {
    std::vector<int> rep(family.size(), 0);
    std::size_t rem = c;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) {
      int n = family[*it].size();
      rep[*it] = static_cast<int>(rem % n);
      rem /= n;
    }
    std::string id = "[";
    for (std::size_t i = 0; i < rep.size(); ++i) {
      if (i) id += ",";
      id += family[i].element(rep[i]);
    }
    ids.push_back(id + "]");
    p.representatives.push_back(std::move(rep));
  }
  p.structure = Structure(lang, ids);
  int n = static_cast<int>(classes);
  auto for_tuples = [&](int arity, auto&& fn) {
    std::vector<int> t(arity, 0);
    while (true) {
      fn(t);
      int q = arity - 1;
      while (q >= 0 && ++t[q] == n) t[q--] = 0;
      if (q < 0) break;
    }
  };
  for (const auto& [r, ar] : lang.relations) {
    for_tuples(ar, [&](const std::vector<int>& t) {
      Mask s = 0;
      for (std::size_t i = 0; i < family.size(); ++i) {
        std::vector<int> args;
        for (int c : t) args.push_back(p.representatives[c][i]);
        if (family[i].holds(r, args)) s |= Mask(1) << i;
      }
      if (contains(s)) p.structure.add_tuple(r, t);
    });
  }
  for (const auto& [fn, ar] : lang.functions) {
    for_tuples(ar, [&](const std::vector<int>& t) {
      std::vector<int> g(family.size());
      for (std::size_t i = 0; i < family.size(); ++i) {
        std::vector<int> args;
        for (int c : t) args.push_back(p.representatives[c][i]);
        g[i] = family[i].value(fn, args);
      }
      p.structure.set_value(fn, t, p.class_of(g));
    });
  }
  return p;
}

std::string describe_choice(const std::vector<Structure>& family, const std::vector<int>& f) {
  std::string s = "(";
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) s += ",";
    s += family[i].element(f[i]);
  }
  return s + ")";
}

}  // namespace

int ReducedProduct::class_of(const std::vector<int>& choice) const {
  std::size_t c = 0;
  for (int i = 0; i < index.size(); ++i) {
    if (!((kernel >> i) & 1u)) continue;
    c = c * static_cast<std::size_t>(factor_size(i)) + static_cast<std::size_t>(choice.at(i));
  }
  return static_cast<int>(c);
}

ReducedProduct build_ultraproduct(const std::vector<Structure>& family, const Ultrafilter& u) {
  ReducedProduct p =
      build(family, u.index(), u.kernel(), [&](Mask s) { return u.contains(s); });
  p.ultra = true;
  return p;
}

ReducedProduct build_reduced_product(const std::vector<Structure>& family, const Filter& f) {
  ReducedProduct p = build(family, f.index(), f.kernel(), [&](Mask s) { return f.contains(s); });
  p.ultra = f.is_ultra();
  p.warning = !p.ultra;
  return p;
}

CheckReport los_check(const std::vector<Structure>& family, const Filter& f, const EnumOptions& opt) {
  if (family.empty()) throw Error("empty family");
  return los_check(family, f, enumerate_table(family.front().language(), opt));
}

CheckReport los_check(const std::vector<Structure>& family, const Filter& f,
                      const FormulaTable& table) {
  CheckReport rep("los");
  ReducedProduct p = build_reduced_product(family, f);
  if (p.warning) rep.note("filter is not ultra: reduced product built with a warning");
  int m = static_cast<int>(family.size());
  int k = static_cast<int>(table.vars.size());

  std::vector<MaskTable> factor_masks;
  for (const auto& s : family) factor_masks.push_back(structure_masks(table, s));
  MaskTable pm = structure_masks(table, p.structure);

  // All choice functions.
  std::vector<std::vector<int>> choices;
  std::size_t total = 1;
  for (const auto& s : family) {
    total *= static_cast<std::size_t>(s.size());
    if (total > kMaxChoices) throw CapExceeded("too many choice functions");
  }
  for (std::size_t c = 0; c < total; ++c) {
    std::vector<int> ch(m);
    std::size_t rem = c;
    for (int i = m - 1; i >= 0; --i) {
      ch[i] = static_cast<int>(rem % family[i].size());
      rem /= family[i].size();
    }
    choices.push_back(std::move(ch));
  }
  std::vector<int> cls;
  for (const auto& ch : choices) cls.push_back(p.class_of(ch));

  AssignmentSpace tuples(static_cast<int>(total), k);
  AssignmentSpace ps(p.structure.size(), k);
  std::vector<AssignmentSpace> fs;
  for (const auto& s : family) fs.emplace_back(s.size(), k);
  std::size_t T = tuples.count;
  std::vector<std::size_t> pidx(T);
  std::vector<std::size_t> fidx(T * m);
  std::vector<std::uint32_t> nonzero(T, 0);
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<int> pv(k);
    for (int v = 0; v < k; ++v) {
      int c = tuples.value(t, v);
      pv[v] = cls[c];
      if (c != 0) nonzero[t] |= 1u << v;
    }
    pidx[t] = ps.encode(pv);
    for (int i = 0; i < m; ++i) {
      std::vector<int> fv(k);
      for (int v = 0; v < k; ++v) fv[v] = choices[tuples.value(t, v)][i];
      fidx[t * m + i] = fs[i].encode(fv);
    }
  }
  std::vector<char> in_filter;
  if (m <= 16) {
    in_filter.resize(std::size_t(1) << m);
    for (Mask s = 0; s < in_filter.size(); ++s) in_filter[s] = f.contains(s);
  }

  long long instances = 0;
  for (std::size_t phi = 0; phi < table.size(); ++phi) {
    std::uint32_t fr = table.nodes[phi].free;
    for (std::size_t t = 0; t < T; ++t) {
      if (nonzero[t] & ~fr) continue;
      ++instances;
      Mask s = 0;
      for (int i = 0; i < m; ++i)
        if (factor_masks[i].get(phi, fidx[t * m + i])) s |= Mask(1) << i;
      bool right = m <= 16 ? in_filter[s] != 0 : f.contains(s);
      bool left = pm.get(phi, pidx[t]);
      if (left == right) continue;
      Counterexample c;
      c.formula = to_string(table.formula(phi));
      c.depth = table.nodes[phi].depth;
      for (int v = 0; v < k; ++v)
        if ((fr >> v) & 1u)
          c.assignment.emplace_back(table.vars[v], describe_choice(family, choices[tuples.value(t, v)]));
      c.detail = std::string("product ") + (left ? "true" : "false") + ", pointwise set " +
                 f.index().show(s) + (right ? " in" : " not in") + " filter";
      rep.add(std::move(c));
    }
  }
  rep.set_stat("formulas", static_cast<long long>(table.size()));
  rep.set_stat("choice_functions", static_cast<long long>(total));
  rep.set_stat("instances", instances);
  rep.set_stat("depth", table.max_depth());
  return rep;
}

DiagonalResult diagonal_embedding(const Structure& a, const Ultrafilter& u, const EnumOptions& opt) {
  return diagonal_embedding(a, u, enumerate_table(a.language(), opt));
}

DiagonalResult diagonal_embedding(const Structure& a, const Ultrafilter& u,
                                  const FormulaTable& table) {
  std::vector<Structure> family(u.index().size(), a);
  DiagonalResult r{build_ultraproduct(family, u), {}, false, CheckReport("diagonal")};
  std::vector<char> hit(r.power.structure.size(), 0);
  for (int x = 0; x < a.size(); ++x) {
    int c = r.power.class_of(std::vector<int>(family.size(), x));
    r.map.push_back(c);
    hit[c] = 1;
  }
  r.image_is_whole = std::find(hit.begin(), hit.end(), 0) == hit.end();
  r.report = check_elementary_embedding(r.map, a, r.power.structure, table);
  r.report.set_stat("power_size", r.power.structure.size());
  r.report.note(r.image_is_whole ? "image is the whole ultrapower"
                                 : "image is a proper part of the ultrapower");
  return r;
}

std::vector<int> principal_projection(const ReducedProduct& p) {
  if (!p.ultra) throw PreconditionError("projection needs an ultraproduct");
  int point = std::countr_zero(p.kernel);
  std::vector<int> out;
  for (const auto& rep : p.representatives) out.push_back(rep[point]);
  return out;
}

std::string subset_name(Mask m, std::size_t n) {
  std::string s = "{";
  bool first = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (!((m >> i) & 1u)) continue;
    if (!first) s += ",";
    s += std::to_string(i);
    first = false;
  }
  return s + "}";
}

CompactnessResult compactness_witness(const std::vector<Formula>& sentences,
                                      const std::map<Mask, Structure>& models) {
  std::size_t n = sentences.size();
  if (n == 0) throw PreconditionError("no sentences");
  if (n > 6) throw CapExceeded("compactness witness is limited to 6 sentences");
  for (const auto& s : sentences)
    if (!free_variables(s).empty()) throw PreconditionError("not a sentence", to_string(s));
  Mask top = (Mask(1) << n) - 1;
  std::vector<std::string> ids;
  std::vector<Structure> family;
  for (Mask j = 1; j <= top; ++j) {
    auto it = models.find(j);
    if (it == models.end()) throw PreconditionError("missing model for subset", subset_name(j, n));
    for (std::size_t i = 0; i < n; ++i)
      if (((j >> i) & 1u) && !satisfies(it->second, sentences[i]))
        throw PreconditionError("model for subset " + subset_name(j, n) + " fails its sentence",
                                to_string(sentences[i]));
    ids.push_back(subset_name(j, n));
    family.push_back(it->second);
  }
  IndexSet index(ids);
  // I_i = {j : sentence i is in j}; position p of the index set is subset p+1.
  std::vector<Mask> sets;
  for (std::size_t i = 0; i < n; ++i) {
    Mask s = 0;
    for (Mask j = 1; j <= top; ++j)
      if ((j >> i) & 1u) s |= Mask(1) << (j - 1);
    sets.push_back(s);
  }
  SetFamily fam(index, sets);
  if (!has_fip(fam)) throw Error("index family unexpectedly lacks the finite intersection property");
  Ultrafilter u = extend_to_ultrafilter(fam);
  CompactnessResult r{index, u, build_ultraproduct(family, u), CheckReport("compactness")};
  for (std::size_t i = 0; i < n; ++i) {
    if (!satisfies(r.product.structure, sentences[i]))
      r.report.fail(to_string(sentences[i]), "ultraproduct does not satisfy the sentence");
  }
  r.report.set_stat("sentences", static_cast<long long>(n));
  r.report.set_stat("index_size", index.size());
  r.report.note("ultrafilter principal at " + index.id(u.point()));
  return r;
}

}  // namespace umt
