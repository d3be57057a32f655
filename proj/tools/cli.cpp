#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "umt/error.hpp"
#include "umt/filters.hpp"
#include "umt/fol.hpp"
#include "umt/io.hpp"
#include "umt/logic.hpp"
#include "umt/mostowski.hpp"
#include "umt/saturation.hpp"
#include "umt/star_map.hpp"
#include "umt/superstructure.hpp"
#include "umt/ultraproduct.hpp"

namespace umt {
namespace {

struct Globals {
  bool json = false;
  int depth = -1;
  std::size_t cap = 0;
  std::uint64_t seed = 1;
  std::string canonicalize;
};

// Every subcommand option; each subcommand binds the ones it reads.
struct Options {
  std::string formula, language, structure, family, ultrafilter, filter, context, model;
  std::string reversal, chain, input, var, set, domain, codomain, corrupt, target;
  std::string require = "order";
  std::vector<std::string> base, assign, params, entities, families, maps;
  int n = 2, k = 1, vars = 2, max_params = 2;
  std::uint64_t and_budget = 200000;
  bool list = false, drop_member = false;
};

struct Outcome {
  CheckReport report;
  json result = json::object();
  std::vector<std::string> text;
  bool summary = true;
};

int depth_or(const Globals& g, int fallback) { return g.depth >= 0 ? g.depth : fallback; }

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw Error("expected a boolean, got '" + s + "'");
}

std::pair<std::string, std::string> split_binding(const std::string& s) {
  auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw Error("expected name=value, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

Env entity_env(const std::vector<std::string>& bindings) {
  Env env;
  for (const auto& b : bindings) {
    auto [k, v] = split_binding(b);
    env[k] = parse_entity(v);
  }
  return env;
}

EntityList atom_list(const std::vector<std::string>& names) {
  if (names.empty()) throw Error("--base needs at least one atom");
  EntityList out;
  for (const auto& n : names) {
    if (!valid_atom_name(n)) throw Error("invalid atom name '" + n + "'");
    out.push_back(Entity::atom(n));
  }
  return canonical_list(out);
}

std::vector<std::string> var_names(int n) {
  static const std::vector<std::string> names{"x", "y", "z", "u", "v", "w", "s", "t"};
  if (n < 1 || n > static_cast<int>(names.size())) throw Error("--vars must be between 1 and 8");
  return {names.begin(), names.begin() + n};
}

std::filesystem::path sibling(const std::string& from, const std::string& rel) {
  std::filesystem::path p(rel);
  if (p.is_absolute()) return p;
  return std::filesystem::path(from).parent_path() / p;
}

json load_or_inline(const std::string& owner, const json& j) {
  if (j.is_string()) return load_json_file(sibling(owner, j.get<std::string>()).string());
  return j;
}

// {"index_set": [...], "structures": {id: file or inline structure}} or a
// list aligned with the index set.
std::vector<Structure> load_family(const std::string& path, IndexSet& index) {
  json j = load_json_file(path);
  if (!j.contains("index_set") || !j.contains("structures"))
    throw Error("family file needs 'index_set' and 'structures'");
  index = IndexSet(string_list(j.at("index_set"), "index_set"));
  const json& s = j.at("structures");
  std::vector<Structure> out;
  for (int i = 0; i < index.size(); ++i) {
    json entry;
    if (s.is_array()) {
      if (s.size() != static_cast<std::size_t>(index.size())) throw Error("one structure per index is required");
      entry = s.at(i);
    } else {
      if (!s.contains(index.id(i))) throw Error("no structure for index '" + index.id(i) + "'");
      entry = s.at(index.id(i));
    }
    out.push_back(structure_from_json(load_or_inline(path, entry)));
  }
  for (std::size_t i = 1; i < out.size(); ++i)
    if (!(out[i].language() == out[0].language())) throw Error("family members must share one language");
  if (out.empty()) throw Error("empty family");
  return out;
}

// The file may carry its own index set; it must then match the family's.
json load_filter_json(const std::string& path, std::optional<IndexSet>& index) {
  json j = load_json_file(path);
  if (j.contains("index_set")) {
    IndexSet own(string_list(j.at("index_set"), "index_set"));
    if (index && !(*index == own)) throw Error("index set of '" + path + "' does not match the family");
    index = own;
  }
  if (!index) throw Error("'" + path + "' needs an index_set");
  return j;
}

Filter load_filter(const Options& o, std::optional<IndexSet> index) {
  if (!o.ultrafilter.empty() && !o.filter.empty()) throw Error("give --ultrafilter or --filter, not both");
  if (!o.ultrafilter.empty()) {
    json j = load_filter_json(o.ultrafilter, index);
    return ultrafilter_from_json(j, *index).as_filter();
  }
  if (!o.filter.empty()) {
    json j = load_filter_json(o.filter, index);
    return filter_from_json(j, *index);
  }
  throw Error("--ultrafilter or --filter is required");
}

StarMapContext load_context(const Options& o, const Globals& g) {
  if (o.context.empty()) throw Error("--context is required");
  json j = load_json_file(o.context);
  if (!g.canonicalize.empty()) j["canonicalize"] = parse_bool(g.canonicalize);
  StarMapContext ctx = context_from_json(j);
  if (g.cap == 0) return ctx;
  return StarMapContext(ctx.base(), ctx.rank_bound(), ctx.ultrafilter(), ctx.canonicalize(), g.cap);
}

json entity_strings(const EntityList& v) {
  json out = json::array();
  for (Entity e : v) out.push_back(e.str());
  return out;
}

json structure_with_representatives(const ReducedProduct& p, const std::vector<Structure>& family) {
  json j = structure_to_json(p.structure);
  json reps = json::object();
  for (std::size_t c = 0; c < p.representatives.size(); ++c) {
    json r = json::object();
    for (int i = 0; i < p.index.size(); ++i) r[p.index.id(i)] = family[i].element(p.representatives[c][i]);
    reps[p.structure.element(static_cast<int>(c))] = r;
  }
  j["representatives"] = reps;
  return j;
}

Outcome cmd_parse(const Options& o, const Globals&) {
  Outcome out;
  out.summary = false;
  Language lang = o.language.empty() ? Language{} : language_from_json(load_json_file(o.language));
  Formula f = parse_formula(o.formula, lang);
  auto fv = free_variables(f);
  out.result = {{"formula", to_string(f)},
                {"normalized", to_string(normalize(f))},
                {"depth", depth(f)},
                {"free_variables", std::vector<std::string>(fv.begin(), fv.end())},
                {"bounded", is_bounded(f)}};
  out.text.push_back(to_string(f));
  return out;
}

Outcome cmd_eval(const Options& o, const Globals&) {
  Outcome out;
  out.summary = false;
  bool value = false;
  if (!o.structure.empty()) {
    Structure s = structure_from_json(load_json_file(o.structure));
    Formula f = parse_formula(o.formula, s.language());
    Assignment a;
    for (const auto& b : o.assign) {
      auto [k, v] = split_binding(b);
      s.index_of(v);
      a[k] = v;
    }
    value = satisfies(s, f, a);
  } else {
    Formula f = parse_formula(o.formula);
    value = eval_bounded(f, entity_env(o.assign));
  }
  out.result = {{"value", value}};
  out.text.push_back(value ? "true" : "false");
  return out;
}

Outcome cmd_vn(const Options& o, const Globals& g) {
  Outcome out;
  out.report = CheckReport("vn");
  EntityList base = atom_list(o.base);
  if (o.n < 0) throw Error("--n must be non-negative");
  auto predicted = vn_size(base.size(), o.n);
  EntityList v = enumerate_vn(base, o.n, g.cap);
  out.report.set_stat("enumerated", static_cast<long long>(v.size()));
  if (predicted) out.report.set_stat("recurrence", static_cast<long long>(*predicted));
  if (!predicted || *predicted != v.size())
    out.report.fail("size recurrence", "enumeration gives " + std::to_string(v.size()));
  out.result = {{"n", o.n}, {"size", v.size()}};
  if (o.list) out.result["elements"] = entity_strings(v);
  out.text.push_back("|V_" + std::to_string(o.n) + "| = " + std::to_string(v.size()));
  if (o.list)
    for (Entity e : v) out.text.push_back(e.str());
  return out;
}

Outcome cmd_closure(const Options& o, const Globals& g) {
  Outcome out;
  out.report = check_closure_properties(atom_list(o.base), o.n, g.seed);
  return out;
}

SetFamily load_set_family(const Options& o) {
  if (o.family.empty()) throw Error("--family is required");
  return family_from_json(load_json_file(o.family));
}

Outcome cmd_fip(const Options& o, const Globals&) {
  Outcome out;
  out.report = CheckReport("fip");
  SetFamily fam = load_set_family(o);
  bool fip = has_fip(fam);
  out.result = {{"fip", fip}, {"intersection", fam.index.ids_of(fam.intersection())}};
  out.text.push_back(std::string("f.i.p.: ") + (fip ? "yes" : "no"));
  return out;
}

Outcome cmd_generate(const Options& o, const Globals&) {
  Outcome out;
  out.report = CheckReport("generate");
  SetFamily fam = load_set_family(o);
  Filter f = generate_filter(fam);
  out.result = {{"kernel", fam.index.ids_of(f.kernel())}, {"ultra", f.is_ultra()}};
  auto inc = is_countably_incomplete(f);
  out.result["countably_incomplete"] = inc.countably_incomplete;
  out.report.note(inc.reason);
  out.text.push_back("kernel " + fam.index.show(f.kernel()));
  return out;
}

Outcome cmd_extend(const Options& o, const Globals&) {
  Outcome out;
  out.report = CheckReport("extend");
  SetFamily fam = load_set_family(o);
  if (!has_fip(fam)) throw PreconditionError("family lacks the finite intersection property");
  Ultrafilter u = extend_to_ultrafilter(fam);
  for (Mask m : fam.members)
    if (!u.contains(m)) out.report.fail("member not in the extension", fam.index.show(m));
  out.result = ultrafilter_to_json(u);
  out.text.push_back("principal at " + u.index().id(u.point()));
  return out;
}

Outcome cmd_ultraproduct(const Options& o, const Globals&) {
  Outcome out;
  out.report = CheckReport("ultraproduct");
  IndexSet idx;
  auto family = load_family(o.family, idx);
  Filter f = load_filter(o, idx);
  ReducedProduct p = build_reduced_product(family, f);
  out.result = structure_with_representatives(p, family);
  out.result["ultra"] = p.ultra;
  out.result["warning"] = p.warning;
  if (p.warning) out.report.note("filter is not an ultrafilter; the product need not satisfy Los");
  if (p.ultra) {
    int point = 0;
    while (!((p.kernel >> point) & 1u)) ++point;
    bool iso = is_isomorphism(p.structure, family[point], principal_projection(p));
    out.report.set_stat("principal_factor_isomorphic", iso);
    if (!iso) out.report.fail("projection to the principal factor", "not an isomorphism");
  }
  out.report.set_stat("size", p.structure.size());
  out.text.push_back("ultraproduct with " + std::to_string(p.structure.size()) + " elements");
  return out;
}

Outcome cmd_los(const Options& o, const Globals& g) {
  Outcome out;
  IndexSet idx;
  auto family = load_family(o.family, idx);
  Filter f = load_filter(o, idx);
  EnumOptions opt;
  opt.max_depth = depth_or(g, 2);
  opt.vars = var_names(o.vars);
  opt.seed = g.seed;
  out.report = los_check(family, f, opt);
  return out;
}

Outcome cmd_diagonal(const Options& o, const Globals& g) {
  Outcome out;
  if (o.structure.empty() || o.ultrafilter.empty()) throw Error("--structure and --ultrafilter are required");
  Structure a = structure_from_json(load_json_file(o.structure));
  std::optional<IndexSet> idx;
  json uj = load_filter_json(o.ultrafilter, idx);
  Ultrafilter u = ultrafilter_from_json(uj, *idx);
  EnumOptions opt;
  opt.max_depth = depth_or(g, 3);
  opt.vars = var_names(o.vars);
  opt.seed = g.seed;
  DiagonalResult d = diagonal_embedding(a, u, opt);
  out.report = d.report;
  json map = json::object();
  for (std::size_t i = 0; i < d.map.size(); ++i) map[a.element(static_cast<int>(i))] = d.power.structure.element(d.map[i]);
  out.result = {{"map", map}, {"image_is_whole", d.image_is_whole}};
  return out;
}

Outcome cmd_compactness(const Options& o, const Globals&) {
  Outcome out;
  if (o.input.empty()) throw Error("--input is required");
  json j = load_json_file(o.input);
  if (!j.contains("language") || !j.contains("sentences") || !j.contains("models"))
    throw Error("compactness input needs 'language', 'sentences' and 'models'");
  Language lang = language_from_json(j.at("language"));
  std::vector<Formula> sentences;
  for (const auto& s : string_list(j.at("sentences"), "sentences")) {
    Formula f = parse_formula(s, lang);
    if (!free_variables(f).empty()) throw PreconditionError("not a sentence", s);
    sentences.push_back(f);
  }
  if (sentences.empty() || sentences.size() > 6) throw Error("between 1 and 6 sentences are supported");
  std::map<std::string, Mask> by_name;
  Mask top = (Mask(1) << sentences.size()) - 1;
  for (Mask m = 1; m <= top; ++m) by_name[subset_name(m, sentences.size())] = m;
  std::map<Mask, Structure> models;
  for (auto it = j.at("models").begin(); it != j.at("models").end(); ++it) {
    auto k = by_name.find(it.key());
    if (k == by_name.end()) throw Error("model key '" + it.key() + "' is not a nonempty subset like {0,1}");
    Structure s = structure_from_json(load_or_inline(o.input, it.value()));
    if (!(s.language() == lang)) throw Error("model " + it.key() + " is over another language");
    models.emplace(k->second, std::move(s));
  }
  CompactnessResult r = compactness_witness(sentences, models);
  out.report = r.report;
  out.result = {{"index_set", r.index.ids()},
                {"principal", r.index.id(r.ultrafilter.point())},
                {"ultraproduct", structure_to_json(r.product.structure)}};
  return out;
}

Outcome cmd_star_context(const Options& o, const Globals& g) {
  Outcome out;
  out.report = CheckReport("star-context");
  StarMapContext ctx = load_context(o, g);
  json images = json::object();
  for (const auto& s : o.entities) {
    Entity e = parse_entity(s);
    images[e.str()] = {{"star", ctx.star(e).str()}, {"sigma", ctx.sigma_image(e).str()}};
    out.text.push_back("*" + e.str() + " = " + ctx.star(e).str());
  }
  out.result = {{"base", entity_strings(ctx.base())},
                {"star_base", ctx.star_base().str()},
                {"rank_bound", ctx.rank_bound()},
                {"materialized_level", ctx.materialized_level()},
                {"tracked", ctx.tracked().size()},
                {"canonicalize", ctx.canonicalize()},
                {"principal", ctx.index().id(ctx.ultrafilter().point())},
                {"images", images}};
  out.report.set_stat("tracked", static_cast<long long>(ctx.tracked().size()));
  out.text.insert(out.text.begin(), "*X = " + ctx.star_base().str());
  return out;
}

Outcome cmd_transfer(const Options& o, const Globals& g) {
  Outcome out;
  StarMapContext ctx = load_context(o, g);
  if (!o.corrupt.empty()) apply_corruption(ctx, o.corrupt);
  TransferOptions opt;
  opt.depth = depth_or(g, 2);
  opt.max_params = o.max_params;
  opt.seed = g.seed;
  opt.and_budget = o.and_budget;
  out.report = check_transfer(ctx, opt);
  if (!o.corrupt.empty()) out.report.note("corruption " + o.corrupt);
  return out;
}

Outcome cmd_star_algebra(const Options& o, const Globals& g) {
  Outcome out;
  StarMapContext ctx = load_context(o, g);
  out.report = star_algebra_suite(ctx, g.seed);
  return out;
}

Outcome cmd_comprehension(const Options& o, const Globals& g) {
  Outcome out;
  out.report = CheckReport("comprehension");
  StarMapContext ctx = load_context(o, g);
  Formula phi = parse_formula(o.formula);
  Entity a = parse_entity(o.set);
  ComprehensionResult r = star_comprehension(ctx, phi, o.var, a, entity_env(o.params));
  if (!r.equal)
    out.report.add(Counterexample{to_string(phi), {{o.var, a.str()}},
                                  r.star_of_set.str() + " != " + r.set_of_star.str(), depth(phi)});
  out.result = {{"star_of_set", r.star_of_set.str()}, {"set_of_star", r.set_of_star.str()}, {"equal", r.equal}};
  out.text.push_back(r.star_of_set.str() + (r.equal ? " = " : " != ") + r.set_of_star.str());
  return out;
}

Outcome cmd_classify(const Options& o, const Globals& g) {
  Outcome out;
  out.report = CheckReport("classify");
  StarMapContext ctx = load_context(o, g);
  json all = json::array();
  for (const auto& s : o.entities) {
    Entity v = parse_entity(s);
    Classification c = classify(ctx, v);
    json r = {{"entity", v.str()}, {"kind", kind_name(c.kind)}, {"detail", c.detail}};
    if (c.witness) r["witness"] = c.witness->str();
    all.push_back(r);
    out.text.push_back(v.str() + ": " + kind_name(c.kind) + (c.witness ? " via " + c.witness->str() : ""));
  }
  if (all.empty()) throw Error("--entity is required");
  out.result = {{"classifications", all}};
  return out;
}

Outcome cmd_hyperfinite(const Options& o, const Globals& g) {
  Outcome out;
  out.report = CheckReport("hyperfinite");
  StarMapContext ctx = load_context(o, g);
  if (o.entities.size() != 1) throw Error("exactly one --entity is required");
  Entity a = parse_entity(o.entities.front());
  auto h = is_hyperfinite(ctx, a);
  if (!h) {
    out.report.fail("not hyperfinite", a.str());
    out.result = {{"hyperfinite", false}};
    return out;
  }
  if (!h->psi) out.report.add(Counterexample{"hyperfiniteness formula", {{"A", a.str()}}, "does not hold", -1});
  out.result = {{"hyperfinite", true},
                {"n", h->n},
                {"f", h->f.str()},
                {"certificate", h->certificate.str()},
                {"psi", h->psi}};
  out.text.push_back(a.str() + " is hyperfinite of size " + std::to_string(h->n));
  return out;
}

Outcome cmd_enlargement(const Options& o, const Globals& g) {
  Outcome out;
  if (!o.context.empty()) {
    StarMapContext ctx = load_context(o, g);
    std::vector<Entity> fams;
    for (const auto& s : o.families) fams.push_back(parse_entity(s));
    if (fams.empty()) throw Error("--family-set is required with --context");
    out.report = enlargement_check(ctx, fams);
    return out;
  }
  if (o.target.empty()) throw Error("--target is required");
  EnlargementResult r = enlargement_pipeline(atom_list(o.base), o.k, parse_entity(o.target), o.drop_member);
  out.report = r.report;
  out.result = {{"index_size", r.index.size()},
                {"fip", r.fip},
                {"principal_at_top", r.principal_at_top},
                {"a", r.a.valid() ? r.a.str() : ""},
                {"sigma_b", r.sigma_b.valid() ? r.sigma_b.str() : ""},
                {"star_b", r.star_b.valid() ? r.star_b.str() : ""}};
  if (r.ultrafilter) out.result["principal"] = r.ultrafilter->index().id(r.ultrafilter->point());
  return out;
}

Outcome cmd_extend_function(const Options& o, const Globals& g) {
  Outcome out;
  out.report = CheckReport("extend-function");
  StarMapContext ctx = load_context(o, g);
  if (o.domain.empty() || o.codomain.empty()) throw Error("--domain and --codomain are required");
  Entity a = parse_entity(o.domain), b = parse_entity(o.codomain);
  std::map<Entity, Entity> f;
  for (const auto& m : o.maps) {
    auto [k, v] = split_binding(m);
    f[parse_entity(k)] = parse_entity(v);
  }
  Entity plus = extend_function(ctx, a, b, f);
  bool fn = sets::is_function(plus);
  if (!fn) out.report.fail("extension", "not a function");
  out.report.set_stat("pairs", static_cast<long long>(plus.size()));
  out.result = {{"extension", plus.str()}};
  out.text.push_back(plus.str());
  return out;
}

OrderReversal load_reversal(const Options& o) {
  if (o.reversal.empty()) throw Error("--reversal is required");
  return reversal_from_json(load_json_file(o.reversal));
}

Outcome cmd_reversal_check(const Options& o, const Globals&) {
  Outcome out;
  out.report = CheckReport("reversal-check");
  OrderReversal p = load_reversal(o);
  if (o.require != "order" && o.require != "anti-additive") throw Error("--require is order or anti-additive");
  auto show = [&](const LawVerdict& v) {
    return v.witness ? "(" + p.show_subset(v.witness->first) + ", " + p.show_subset(v.witness->second) + ")"
                     : std::string();
  };
  LawVerdict order = is_order_reversal(p), anti = is_anti_additive(p);
  LocalFiniteness lf = is_locally_finite(p);
  if (!order.holds) out.report.add(Counterexample{"order-reversal", {}, "violating pair " + show(order), -1});
  if (o.require == "anti-additive" && !anti.holds)
    out.report.add(Counterexample{"anti-additivity", {}, "violating pair " + show(anti), -1});
  out.result = {{"order_reversal", order.holds},
                {"anti_additive", anti.holds},
                {"locally_finite", lf.holds},
                {"bound", lf.bound}};
  if (!anti.holds) out.result["anti_additive_witness"] = show(anti);
  out.text.push_back(std::string("order-reversal: ") + (order.holds ? "yes" : "no"));
  out.text.push_back(std::string("anti-additive: ") + (anti.holds ? "yes" : "no " + show(anti)));
  return out;
}

Outcome cmd_support(const Options& o, const Globals&) {
  Outcome out;
  out.report = CheckReport("support");
  OrderReversal p = load_reversal(o);
  Support s = support_of(p);
  OrderReversal back = reversal_from_support(s, p.ground);
  for (Mask m = 0; m <= p.full_ground(); ++m)
    if (back.at(m) != p.at(m))
      out.report.add(Counterexample{"support round trip", {{"s", p.show_subset(m)}},
                                    p.index.show(p.at(m)) + " != " + p.index.show(back.at(m)), -1});
  json phi = json::object();
  for (int i = 0; i < s.index.size(); ++i) {
    if (s.phi[i]) {
      json members = json::array();
      for (std::size_t t = 0; t < p.ground.size(); ++t)
        if ((*s.phi[i] >> t) & 1u) members.push_back(p.ground[t]);
      phi[s.index.id(i)] = members;
      out.text.push_back("Phi_" + s.index.id(i) + " = " + p.show_subset(*s.phi[i]));
    } else {
      phi[s.index.id(i)] = nullptr;
    }
  }
  out.result = {{"phi", phi}};
  return out;
}

Outcome cmd_localize(const Options& o, const Globals&) {
  Outcome out;
  OrderReversal p = load_reversal(o);
  if (o.chain.empty()) throw Error("--chain is required");
  json cj = load_json_file(o.chain);
  if (!cj.is_array()) throw Error("chain must be a list of index subsets");
  std::vector<Mask> chain;
  for (const auto& s : cj) chain.push_back(p.index.mask_of(string_list(s, "chain member")));
  Localized l = localize(p, chain);
  out.report = l.report;
  json levels = json::object();
  for (int i = 0; i < p.index.size(); ++i) levels[p.index.id(i)] = l.level[i];
  out.result = {{"lp", reversal_to_json(l.lp)}, {"level", levels}};
  return out;
}

EpsilonModel load_model(const Options& o) {
  if (o.model.empty()) throw Error("--model is required");
  return model_from_json(load_json_file(o.model));
}

Outcome cmd_collapse(const Options& o, const Globals& g) {
  Outcome out;
  EpsilonModel m = load_model(o);
  CollapseResult r = collapse(m);
  out.report = verify_collapse(m, r, depth_or(g, 2));
  json h = json::object();
  for (int i = 0; i < m.size(); ++i) h[m.id(i)] = r.h[i].str();
  out.result = {{"image", r.image.str()}, {"h", h}};
  out.text.push_back("h(" + m.id(m.base()) + ") = " + r.image.str());
  return out;
}

Outcome cmd_truncate(const Options& o, const Globals&) {
  Outcome out;
  out.report = CheckReport("truncate");
  EpsilonModel m = load_model(o);
  EpsilonModel t = truncate(m);
  auto levels = nu_levels(m);
  json lv = json::object();
  for (int i = 0; i < m.size(); ++i) lv[m.id(i)] = levels[i];
  out.report.set_stat("removed", m.size() - t.size());
  if (!(truncate(t) == t)) out.report.fail("idempotence", "truncating twice changes the model");
  out.result = {{"model", model_to_json(t)}, {"levels", lv}};
  out.text.push_back(model_to_json(t).dump());
  return out;
}

struct MapEntry {
  const char* result;
  const char* module;
  const char* tests;
};

const std::vector<MapEntry>& theory_map() {
  static const std::vector<MapEntry> entries{
      {"satisfaction and the quantifier-expansion oracle", "fol-semantics",
       "test_fol: satisfies agrees with expansion oracle; acceptance: fol oracle"},
      {"elementary embeddings and diagrams", "fol-semantics",
       "test_fol: elementary embedding checker, diagram sentences hold"},
      {"filters, f.i.p. and ultrafilter extension", "filters",
       "test_filters: kernel characterization, extension contains family, partition refutation"},
      {"finite ultrafilters are principal", "filters", "test_filters: every ultrafilter is principal"},
      {"Los theorem", "ultraproduct", "test_ultraproduct: exhaustive Los suite; acceptance: Los exhaustive"},
      {"diagonal embedding is elementary", "ultraproduct",
       "test_ultraproduct: diagonal depth-3; acceptance: principal collapse"},
      {"compactness via ultraproducts", "ultraproduct", "test_ultraproduct: compactness demo; acceptance: compactness"},
      {"superstructure levels and their sizes", "superstructure",
       "test_superstructure: level sizes by enumeration and recurrence; acceptance: superstructure arithmetic"},
      {"bounded definitions of set predicates", "logic-core",
       "test_superstructure: phi library against native predicates; acceptance: phi-library oracle"},
      {"closure properties of the superstructure", "superstructure",
       "test_superstructure: closure suite; acceptance: closure-property suite"},
      {"bar translation of structures", "superstructure", "test_superstructure: bar translation agrees"},
      {"transfer principle for the star map", "star-map",
       "test_star_map: transfer passes, corruptions detected; acceptance: transfer mutation testing"},
      {"algebra of starred sets", "star-map", "test_star_map: star algebra suite; acceptance: star-algebra suite"},
      {"standard, internal and external sets", "star-map", "test_star_map: classification, internal definition"},
      {"star of a comprehension", "star-map", "test_star_map: comprehension commutes with star"},
      {"concurrent relations and enlargements", "saturation-kit",
       "test_saturation: concurrency, enlargement check and pipeline; acceptance: enlargement pipeline"},
      {"hyperfinite sets", "saturation-kit", "test_saturation: hyperfinite witnesses"},
      {"comprehensiveness", "saturation-kit", "test_saturation: extend_function"},
      {"order-reversals, supports and localization", "saturation-kit",
       "test_saturation: support round trip, localize, monotone anti-additive; acceptance: reversal algebra"},
      {"Mostowski collapse", "mostowski",
       "test_mostowski: collapse, round trip, truncation; acceptance: Mostowski suite"},
  };
  return entries;
}

Outcome cmd_theory_map(const Options&, const Globals&) {
  Outcome out;
  out.summary = false;
  json arr = json::array();
  for (const auto& e : theory_map()) {
    arr.push_back({{"result", e.result}, {"module", e.module}, {"tests", e.tests}});
    out.text.push_back(std::string(e.result) + " [" + e.module + "] -> " + e.tests);
  }
  out.result = {{"entries", arr}};
  return out;
}

json report_json(const std::string& sub, const std::string& verdict, int code, const Outcome& o,
                 const Globals& g) {
  json cx = json::array();
  for (const auto& c : o.report.counterexamples()) cx.push_back(to_json(c));
  return json{{"subcommand", sub},
              {"verdict", verdict},
              {"exit_code", code},
              {"counterexamples", cx},
              {"failures", o.report.failures()},
              {"stats", o.report.stats()},
              {"notes", o.report.notes()},
              {"seed", g.seed},
              {"version", kVersion},
              {"result", o.result}};
}

class CapScope {
 public:
  explicit CapScope(std::size_t cap) {
    if (cap == 0) return;
    if (const char* old = std::getenv("UMT_CAP")) saved_ = old;
    setenv("UMT_CAP", std::to_string(cap).c_str(), 1);
    active_ = true;
  }
  ~CapScope() {
    if (!active_) return;
    if (saved_) setenv("UMT_CAP", saved_->c_str(), 1);
    else unsetenv("UMT_CAP");
  }

 private:
  bool active_ = false;
  std::optional<std::string> saved_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Globals g;
  Options o;
  CLI::App app{"Finite-scale verification of ultrapowers, superstructures and the star map", "umt"};
  app.set_version_flag("--version", kVersion);
  app.add_flag("--json", g.json, "Print the machine-readable report");
  app.add_option("--depth", g.depth, "Formula depth for enumerating checks")->check(CLI::NonNegativeNumber);
  app.add_option("--cap", g.cap, "Materialization cap (sets UMT_CAP)");
  app.add_option("--seed", g.seed, "Seed for sampled checks");
  app.add_option("--canonicalize", g.canonicalize, "Identify atom classes with their values (true/false)");
  app.require_subcommand(1);
  app.fallthrough();

  std::string chosen;
  std::function<Outcome()> handler;
  auto sub = [&](const std::string& name, const std::string& help,
                 std::function<Outcome(const Options&, const Globals&)> fn) {
    CLI::App* s = app.add_subcommand(name, help);
    s->fallthrough();
    s->callback([&, name, fn] {
      chosen = name;
      handler = [&, fn] { return fn(o, g); };
    });
    return s;
  };
  auto context_opt = [&](CLI::App* s) { s->add_option("--context", o.context, "Star-map context file")->required(); };

  auto* p = sub("parse", "Parse and print a formula", cmd_parse);
  p->add_option("--formula", o.formula)->required();
  p->add_option("--language", o.language, "Language file");

  auto* e = sub("eval", "Evaluate a formula on a structure or on entities", cmd_eval);
  e->add_option("--formula", o.formula)->required();
  e->add_option("--structure", o.structure, "Structure file; omit for membership formulas");
  e->add_option("--assign", o.assign, "var=value");

  auto* vn = sub("vn", "Enumerate a superstructure level", cmd_vn);
  vn->add_option("--base", o.base)->delimiter(',')->required();
  vn->add_option("--n", o.n);
  vn->add_flag("--list", o.list);

  auto* cc = sub("closure-check", "Closure properties of V_n(X)", cmd_closure);
  cc->add_option("--base", o.base)->delimiter(',')->required();
  cc->add_option("--n", o.n);

  CLI::App* filters = app.add_subcommand("filters", "Filter operations on a set family");
  filters->fallthrough();
  filters->require_subcommand(1);
  auto filter_sub = [&](const std::string& name, const std::string& help,
                        std::function<Outcome(const Options&, const Globals&)> fn) {
    CLI::App* s = filters->add_subcommand(name, help);
    s->fallthrough();
    s->add_option("--family", o.family, "Set family file")->required();
    s->callback([&, name, fn] {
      chosen = "filters " + name;
      handler = [&, fn] { return fn(o, g); };
    });
  };
  filter_sub("fip", "Finite intersection property", cmd_fip);
  filter_sub("generate", "Generated filter", cmd_generate);
  filter_sub("extend", "Extend to an ultrafilter", cmd_extend);

  auto family_opts = [&](CLI::App* s) {
    s->add_option("--family", o.family, "Indexed family file")->required();
    s->add_option("--ultrafilter", o.ultrafilter);
    s->add_option("--filter", o.filter);
  };
  family_opts(sub("ultraproduct", "Build an ultraproduct or reduced product", cmd_ultraproduct));
  auto* los = sub("los-check", "Exhaustive Los check", cmd_los);
  family_opts(los);
  los->add_option("--vars", o.vars, "Number of variables");

  auto* dg = sub("diagonal", "Diagonal embedding into an ultrapower", cmd_diagonal);
  dg->add_option("--structure", o.structure)->required();
  dg->add_option("--ultrafilter", o.ultrafilter)->required();
  dg->add_option("--vars", o.vars);

  sub("compactness", "Ultraproduct model of a finitely satisfiable set", cmd_compactness)
      ->add_option("--input", o.input)
      ->required();

  auto* sc = sub("star-context", "Describe a star-map context", cmd_star_context);
  context_opt(sc);
  sc->add_option("--entity", o.entities);

  auto* tc = sub("transfer-check", "Bounded transfer check", cmd_transfer);
  context_opt(tc);
  tc->add_option("--corrupt", o.corrupt, "Apply a named corruption first")
      ->check(CLI::IsMember(corruption_names()));
  tc->add_option("--max-params", o.max_params);
  tc->add_option("--and-budget", o.and_budget, "Top-level conjunctions kept before sampling");

  context_opt(sub("star-algebra", "Algebraic laws of the star map", cmd_star_algebra));

  auto* cm = sub("comprehension", "Star of a defined subset", cmd_comprehension);
  context_opt(cm);
  cm->add_option("--formula", o.formula)->required();
  cm->add_option("--var", o.var)->required();
  cm->add_option("--set", o.set)->required();
  cm->add_option("--param", o.params, "name=entity");

  auto* cl = sub("classify", "Standard, internal or external", cmd_classify);
  context_opt(cl);
  cl->add_option("--entity", o.entities)->required();

  auto* hf = sub("hyperfinite", "Hyperfiniteness witness", cmd_hyperfinite);
  context_opt(hf);
  hf->add_option("--entity", o.entities)->required();

  auto* en = sub("enlargement", "Enlargement pipeline or family check", cmd_enlargement);
  en->add_option("--base", o.base)->delimiter(',');
  en->add_option("--k", o.k);
  en->add_option("--target", o.target);
  en->add_flag("--drop-member", o.drop_member);
  en->add_option("--context", o.context);
  en->add_option("--family-set", o.families, "Family of sets as an entity literal");

  auto* ef = sub("extend-function", "Internal extension of a map", cmd_extend_function);
  context_opt(ef);
  ef->add_option("--domain", o.domain)->required();
  ef->add_option("--codomain", o.codomain)->required();
  ef->add_option("--map", o.maps, "x=value");

  auto* rc = sub("reversal-check", "Order-reversal laws", cmd_reversal_check);
  rc->add_option("--reversal", o.reversal)->required();
  rc->add_option("--require", o.require, "order or anti-additive");

  sub("support", "Support of an anti-additive reversal", cmd_support)
      ->add_option("--reversal", o.reversal)
      ->required();

  auto* lc = sub("localize", "Localize a reversal along a chain", cmd_localize);
  lc->add_option("--reversal", o.reversal)->required();
  lc->add_option("--chain", o.chain)->required();

  sub("collapse", "Mostowski collapse of an epsilon-model", cmd_collapse)->add_option("--model", o.model)->required();
  sub("truncate", "Truncate an epsilon-model", cmd_truncate)->add_option("--model", o.model)->required();

  sub("theory-map", "Results and the tests that cover them", cmd_theory_map)->alias("paper-map");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  }

  Outcome result;
  std::string error_kind, error_message, witness;
  try {
    if (!handler) throw Error("no subcommand given");
    if (!g.canonicalize.empty()) parse_bool(g.canonicalize);
    CapScope cap(g.cap);
    result = handler();
    if (!result.report.seed()) result.report.set_seed(g.seed);
  } catch (const PreconditionError& ex) {
    error_kind = "precondition";
    error_message = ex.what();
    witness = ex.witness();
  } catch (const CapExceeded& ex) {
    error_kind = "cap";
    error_message = ex.what();
  } catch (const ParseError& ex) {
    error_kind = "parse";
    error_message = ex.what();
  } catch (const Error& ex) {
    error_kind = "input";
    error_message = ex.what();
  } catch (const json::exception& ex) {
    error_kind = "input";
    error_message = ex.what();
  } catch (const std::exception& ex) {
    error_kind = "internal";
    error_message = ex.what();
  }

  if (!error_kind.empty()) {
    Outcome failed;
    failed.report.add(Counterexample{error_kind, {}, error_message, -1});
    json j = report_json(chosen, "error", 2, failed, g);
    j["error"] = {{"kind", error_kind}, {"message", error_message}, {"witness", witness}};
    if (g.json) out << j.dump(2) << "\n";
    else err << "error (" << error_kind << "): " << error_message << "\n";
    return 2;
  }

  int code = result.report.passed() ? 0 : 1;
  if (g.json) {
    out << report_json(chosen, code == 0 ? "pass" : "fail", code, result, g).dump(2) << "\n";
  } else {
    for (const auto& line : result.text) out << line << "\n";
    if (result.summary || code != 0) out << result.report.summary() << "\n";
    for (const auto& n : result.report.notes()) out << "  note: " << n << "\n";
  }
  return code;
}

}  // namespace umt
