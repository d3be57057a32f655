#include "umt/io.hpp"

#include <fstream>
#include <sstream>

#include "umt/error.hpp"

namespace umt {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("malformed JSON in '" + path + "': " + e.what());
  }
}

std::vector<std::string> string_list(const json& j, const char* what) {
  if (!j.is_array()) throw Error(std::string(what) + " must be a list of strings");
  std::vector<std::string> out;
  for (const auto& x : j) {
    if (!x.is_string()) throw Error(std::string(what) + " must be a list of strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::map<std::string, int> arity_map(const json& j) {
  std::map<std::string, int> out;
  if (j.is_null()) return out;
  if (!j.is_object()) throw Error("symbol table must be an object of arities");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number_integer()) throw Error("arity of '" + it.key() + "' must be an integer");
    out[it.key()] = it.value().get<int>();
  }
  return out;
}

}  // namespace

Language language_from_json(const json& j) {
  Language l;
  if (j.contains("relations")) l.relations = arity_map(j.at("relations"));
  if (j.contains("functions")) l.functions = arity_map(j.at("functions"));
  l.validate();
  return l;
}

json language_to_json(const Language& l) {
  return json{{"relations", l.relations}, {"functions", l.functions}};
}

Structure structure_from_json(const json& j) {
  Language lang = language_from_json(field(j, "language"));
  Structure s(lang, string_list(field(j, "universe"), "universe"));
  if (j.contains("relations")) {
    for (auto it = j.at("relations").begin(); it != j.at("relations").end(); ++it) {
      if (!lang.has_relation(it.key())) throw Error("undeclared relation '" + it.key() + "'");
      int ar = lang.relations.at(it.key());
      for (const auto& t : it.value()) {
        auto ids = string_list(t, "relation tuple");
        if (static_cast<int>(ids.size()) != ar) throw Error("wrong tuple length for '" + it.key() + "'");
        std::vector<int> args;
        for (const auto& id : ids) args.push_back(s.index_of(id));
        s.add_tuple(it.key(), args);
      }
    }
  }
  if (j.contains("functions")) {
    for (auto it = j.at("functions").begin(); it != j.at("functions").end(); ++it) {
      if (!lang.has_function(it.key())) throw Error("undeclared function '" + it.key() + "'");
      int ar = lang.functions.at(it.key());
      for (const auto& t : it.value()) {
        auto ids = string_list(t, "function entry");
        if (static_cast<int>(ids.size()) != ar + 1)
          throw Error("function entries list the arguments then the value");
        std::vector<int> args;
        for (int k = 0; k < ar; ++k) args.push_back(s.index_of(ids[k]));
        s.set_value(it.key(), args, s.index_of(ids.back()));
      }
    }
  }
  s.validate();
  return s;
}

json structure_to_json(const Structure& s) {
  json rels = json::object(), fns = json::object();
  for (const auto& [r, ar] : s.language().relations) {
    json ts = json::array();
    for (const auto& t : s.tuples(r)) {
      json row = json::array();
      for (int x : t) row.push_back(s.element(x));
      ts.push_back(row);
    }
    rels[r] = ts;
  }
  for (const auto& [f, ar] : s.language().functions) {
    json rows = json::array();
    std::size_t n = s.universe().size();
    std::size_t total = 1;
    for (int k = 0; k < ar; ++k) total *= n;
    for (std::size_t off = 0; off < total; ++off) {
      std::vector<int> args(ar);
      std::size_t c = off;
      for (int k = ar - 1; k >= 0; --k) {
        args[k] = static_cast<int>(c % n);
        c /= n;
      }
      json row = json::array();
      for (int x : args) row.push_back(s.element(x));
      row.push_back(s.element(s.value(f, args)));
      rows.push_back(row);
    }
    fns[f] = rows;
  }
  return json{{"language", language_to_json(s.language())},
              {"universe", s.universe()},
              {"relations", rels},
              {"functions", fns}};
}

SetFamily family_from_json(const json& j) {
  IndexSet idx(string_list(field(j, "index_set"), "index_set"));
  std::vector<Mask> members;
  for (const auto& m : field(j, "members")) members.push_back(idx.mask_of(string_list(m, "member")));
  return SetFamily(idx, members);
}

json family_to_json(const SetFamily& f) {
  json members = json::array();
  for (Mask m : f.members) members.push_back(f.index.ids_of(m));
  return json{{"index_set", f.index.ids()}, {"members", members}};
}

Filter filter_from_json(const json& j, const IndexSet& index) {
  if (j.contains("principal")) return Filter(index, Mask(1) << index.index_of(j.at("principal").get<std::string>()));
  if (j.contains("kernel")) return Filter(index, index.mask_of(string_list(j.at("kernel"), "kernel")));
  std::vector<Mask> members;
  for (const auto& m : field(j, "members")) members.push_back(index.mask_of(string_list(m, "member")));
  return Filter::from_family(SetFamily(index, members));
}

Ultrafilter ultrafilter_from_json(const json& j, const IndexSet& index) {
  if (j.contains("principal")) return Ultrafilter(index, index.index_of(j.at("principal").get<std::string>()));
  std::vector<Mask> members;
  for (const auto& m : field(j, "members")) members.push_back(index.mask_of(string_list(m, "member")));
  SetFamily fam(index, members);
  if (!is_ultrafilter(fam)) throw PreconditionError("member list is not an ultrafilter");
  return Ultrafilter::from_filter(Filter::from_family(fam));
}

json ultrafilter_to_json(const Ultrafilter& u) {
  return json{{"index_set", u.index().ids()}, {"principal", u.index().id(u.point())}};
}

StarMapContext context_from_json(const json& j) {
  EntityList base;
  for (const auto& a : string_list(field(j, "base"), "base")) {
    if (!valid_atom_name(a)) throw Error("invalid atom name '" + a + "'");
    base.push_back(Entity::atom(a));
  }
  int rank_bound = j.value("rank_bound", 2);
  std::vector<std::string> ids = j.contains("index_set") ? string_list(j.at("index_set"), "index_set")
                                                         : std::vector<std::string>{"0"};
  IndexSet idx(ids);
  Ultrafilter u = j.contains("ultrafilter") ? ultrafilter_from_json(j.at("ultrafilter"), idx) : Ultrafilter(idx, 0);
  bool canon = j.value("canonicalize", true);
  return StarMapContext(base, rank_bound, u, canon);
}

std::string subset_key(const std::vector<std::string>& ground, Mask s) {
  std::string out = "[";
  bool first = true;
  for (std::size_t i = 0; i < ground.size(); ++i)
    if ((s >> i) & 1u) {
      if (!first) out += ",";
      out += ground[i];
      first = false;
    }
  return out + "]";
}

namespace {

Mask parse_subset_key(const std::string& key, const std::vector<std::string>& ground) {
  if (key.size() < 2 || key.front() != '[' || key.back() != ']') throw Error("bad subset key '" + key + "'");
  std::string body = key.substr(1, key.size() - 2);
  Mask m = 0;
  if (body.empty()) return m;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(' '), e = item.find_last_not_of(' ');
    if (b == std::string::npos) throw Error("empty element in subset key '" + key + "'");
    item = item.substr(b, e - b + 1);
    auto it = std::find(ground.begin(), ground.end(), item);
    if (it == ground.end()) throw Error("unknown ground element '" + item + "' in '" + key + "'");
    m |= Mask(1) << (it - ground.begin());
  }
  return m;
}

}  // namespace

OrderReversal reversal_from_json(const json& j) {
  auto ground = string_list(field(j, "ground_set"), "ground_set");
  IndexSet idx(string_list(field(j, "index_set"), "index_set"));
  if (ground.size() > 16) throw CapExceeded("ground sets are limited to 16 elements");
  std::vector<Mask> vals(std::size_t(1) << ground.size(), 0);
  std::vector<char> seen(vals.size(), 0);
  const json& p = field(j, "p");
  for (auto it = p.begin(); it != p.end(); ++it) {
    Mask s = parse_subset_key(it.key(), ground);
    vals[s] = idx.mask_of(string_list(it.value(), "reversal value"));
    seen[s] = 1;
  }
  for (std::size_t s = 0; s < seen.size(); ++s)
    if (!seen[s]) throw Error("reversal undefined at " + subset_key(ground, s));
  return OrderReversal(ground, idx, vals);
}

json reversal_to_json(const OrderReversal& r) {
  json p = json::object();
  for (Mask s = 0; s <= r.full_ground(); ++s) p[subset_key(r.ground, s)] = r.index.ids_of(r.at(s));
  return json{{"ground_set", r.ground}, {"index_set", r.index.ids()}, {"p", p}};
}

EpsilonModel model_from_json(const json& j) {
  auto carrier = string_list(field(j, "carrier"), "carrier");
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& e : field(j, "E")) {
    auto pr = string_list(e, "edge");
    if (pr.size() != 2) throw Error("edges are pairs [b, a] meaning b E a");
    edges.push_back({pr[0], pr[1]});
  }
  const json& b = field(j, "base");
  if (!b.is_string()) throw Error("base must be a node id");
  return EpsilonModel(carrier, edges, b.get<std::string>());
}

json model_to_json(const EpsilonModel& m) {
  json es = json::array();
  for (const auto& [b, a] : m.edges()) es.push_back({b, a});
  return json{{"carrier", m.carrier()}, {"E", es}, {"base", m.id(m.base())}};
}

}  // namespace umt
