#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "umt/error.hpp"
#include "umt/io.hpp"
#include "umt/mostowski.hpp"
#include "umt/saturation.hpp"
#include "umt/star_map.hpp"
#include "umt/superstructure.hpp"
#include "umt/ultraproduct.hpp"

namespace py = pybind11;
using namespace umt;

namespace {

// JSON crosses the boundary as text; the package wraps it with the json module.
json parse_text(const std::string& s) { return json::parse(s); }

std::string report_text(const CheckReport& r) { return r.to_json().dump(); }

IndexSet index_of_size(int n) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  return IndexSet(ids);
}

Env to_env(const std::map<std::string, Entity>& m) { return Env(m.begin(), m.end()); }

}  // namespace

PYBIND11_MODULE(_umt, m) {
  m.doc() = "Finite-scale model theory: entities, bounded formulas, ultraproducts and the star map";
  m.attr("__version__") = kVersion;

  // Later registrations are tried first, so the base class goes first.
  auto& error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", error.ptr());
  py::register_exception<CapExceeded>(m, "CapExceeded", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());

  py::class_<Entity>(m, "Entity")
      .def(py::init([](const std::string& literal) { return parse_entity(literal); }), py::arg("literal"))
      .def_static("atom", [](const std::string& n) { return Entity::atom(n); })
      .def_static("set", [](const std::vector<Entity>& ms) { return Entity::set(ms); })
      .def_property_readonly("is_atom", &Entity::is_atom)
      .def_property_readonly("is_set", &Entity::is_set)
      .def_property_readonly("rank", &Entity::rank)
      .def_property_readonly("members", [](Entity e) { return e.members(); })
      .def("__contains__", &Entity::contains)
      .def("__len__", &Entity::size)
      .def("__str__", &Entity::str)
      .def("__repr__", [](Entity e) { return "Entity('" + e.str() + "')"; })
      .def("__eq__", [](Entity a, Entity b) { return a == b; })
      .def("__lt__", [](Entity a, Entity b) { return a < b; })
      .def("__hash__", &Entity::hash);

  m.def("pair", &kuratowski, py::arg("a"), py::arg("b"));

  m.def(
      "parse_formula", [](const std::string& s) { return to_string(parse_formula(s)); }, py::arg("text"),
      "Parses a membership formula and returns its printed form.");
  m.def(
      "eval_bounded",
      [](const std::string& formula, const std::map<std::string, Entity>& env) {
        return eval_bounded(parse_formula(formula), to_env(env));
      },
      py::arg("formula"), py::arg("env") = std::map<std::string, Entity>{});

  m.def("vn_size", &vn_size, py::arg("base"), py::arg("n"));
  m.def(
      "enumerate_vn",
      [](const std::vector<std::string>& base, int n) {
        EntityList atoms;
        for (const auto& a : base) atoms.push_back(Entity::atom(a));
        return enumerate_vn(atoms, n);
      },
      py::arg("base"), py::arg("n"));

  m.def(
      "satisfies",
      [](const std::string& structure, const std::string& formula, const Assignment& a) {
        Structure s = structure_from_json(parse_text(structure));
        return satisfies(s, parse_formula(formula, s.language()), a);
      },
      py::arg("structure"), py::arg("formula"), py::arg("assignment") = Assignment{});

  m.def(
      "los_check",
      [](const std::vector<std::string>& structures, int principal, int depth) {
        std::vector<Structure> fam;
        for (const auto& s : structures) fam.push_back(structure_from_json(parse_text(s)));
        EnumOptions opt;
        opt.max_depth = depth;
        Ultrafilter u(index_of_size(static_cast<int>(fam.size())), principal);
        return report_text(los_check(fam, u.as_filter(), opt));
      },
      py::arg("structures"), py::arg("principal"), py::arg("depth") = 2);

  py::class_<StarMapContext>(m, "StarContext")
      .def(py::init([](const std::vector<std::string>& base, int rank_bound, int index_size, int principal,
                       bool canonicalize) {
             EntityList atoms;
             for (const auto& a : base) atoms.push_back(Entity::atom(a));
             return StarMapContext(atoms, rank_bound, Ultrafilter(index_of_size(index_size), principal),
                                   canonicalize);
           }),
           py::arg("base"), py::arg("rank_bound") = 2, py::arg("index_size") = 2, py::arg("principal") = 0,
           py::arg("canonicalize") = true)
      .def("star", &StarMapContext::star)
      .def("sigma", &StarMapContext::sigma_image)
      .def_property_readonly("star_base", &StarMapContext::star_base)
      .def_property_readonly("tracked", &StarMapContext::tracked)
      .def("classify",
           [](const StarMapContext& ctx, Entity v) {
             Classification c = classify(ctx, v);
             return py::make_tuple(kind_name(c.kind), c.witness ? py::cast(*c.witness) : py::none());
           })
      .def(
          "check_transfer",
          [](const StarMapContext& ctx, int depth) {
            TransferOptions opt;
            opt.depth = depth;
            return report_text(check_transfer(ctx, opt));
          },
          py::arg("depth") = 1)
      .def("star_algebra", [](const StarMapContext& ctx) { return report_text(star_algebra_suite(ctx)); });

  m.def(
      "collapse",
      [](const std::string& model) {
        EpsilonModel em = model_from_json(parse_text(model));
        CollapseResult r = collapse(em);
        std::map<std::string, Entity> h;
        for (int a = 0; a < em.size(); ++a) h[em.id(a)] = r.h[a];
        return h;
      },
      py::arg("model"));

  m.def(
      "support_of",
      [](const std::string& reversal) {
        OrderReversal p = reversal_from_json(parse_text(reversal));
        Support s = support_of(p);
        std::map<std::string, std::vector<std::string>> out;
        for (int i = 0; i < p.index.size(); ++i) {
          std::vector<std::string> members;
          for (std::size_t t = 0; t < p.ground.size(); ++t)
            if ((*s.phi[i] >> t) & 1u) members.push_back(p.ground[t]);
          out[p.index.id(i)] = members;
        }
        return out;
      },
      py::arg("reversal"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one umt command in-process; returns (exit code, stdout, stderr).");
}
