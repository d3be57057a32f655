#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "umt/enumeration.hpp"
#include "umt/logic.hpp"
#include "umt/report.hpp"

namespace umt {

// Finite first-order structure. Relations and total functions are stored as
// dense row-major tables over element indices.
class Structure {
 public:
  Structure() = default;
  Structure(Language lang, std::vector<std::string> universe);

  const Language& language() const { return lang_; }
  const std::vector<std::string>& universe() const { return universe_; }
  int size() const { return static_cast<int>(universe_.size()); }
  int index_of(const std::string& id) const;
  const std::string& element(int i) const { return universe_.at(i); }

  void set_relation(const std::string& r, const std::vector<std::vector<int>>& tuples);
  void add_tuple(const std::string& r, const std::vector<int>& args);
  bool holds(const std::string& r, const std::vector<int>& args) const;
  const std::vector<char>& relation_table(const std::string& r) const;

  void set_value(const std::string& f, const std::vector<int>& args, int value);
  int value(const std::string& f, const std::vector<int>& args) const;
  const std::vector<int>& function_table(const std::string& f) const;
  // Throws unless every function entry has been assigned.
  void validate() const;

  std::vector<std::vector<int>> tuples(const std::string& r) const;
  std::size_t offset(const std::vector<int>& args) const;

 private:
  Language lang_;
  std::vector<std::string> universe_;
  std::map<std::string, int> index_;
  std::map<std::string, std::vector<char>> rel_;
  std::map<std::string, std::vector<int>> fn_;
};

using Assignment = std::map<std::string, std::string>;

std::string eval_term(const Structure& s, const Term& t, const Assignment& a);
// Tarskian satisfaction; membership atoms and bounded quantifiers are not
// part of a first-order language and raise an error.
bool satisfies(const Structure& s, const Formula& f, const Assignment& a = {});

// Materialized enumeration; refuses depths above depth_cap.
std::vector<Formula> enumerate_formulas(const Language& lang,
                                        const std::vector<std::string>& vars, int max_depth,
                                        int depth_cap = 3);

// Truth tables of an enumeration over a structure, index-level helpers.
MaskTable structure_masks(const FormulaTable& table, const Structure& s);
int term_value(const Structure& s, const Term& t, const std::vector<std::string>& vars,
               const AssignmentSpace& space, std::size_t assignment);

// h maps A's element indices to B's. Checks A |= phi[a] <=> B |= phi[h(a)]
// for every enumerated phi and tuple a; the first counterexample has
// minimal depth.
CheckReport check_elementary_embedding(const std::vector<int>& h, const Structure& a,
                                       const Structure& b, const EnumOptions& opt);
CheckReport check_elementary_embedding(const std::vector<int>& h, const Structure& a,
                                       const Structure& b, const FormulaTable& table);

struct Diagram {
  Language language;  // with a constant c_<id> for every element
  Structure expanded;
  std::vector<Formula> sentences;
};
// True instances of the enumerated formulas with element constants, plus
// negations of false atoms.
// Refuses opt.max_depth above 3.
Diagram elementary_diagram(const Structure& s, const EnumOptions& opt);
std::string element_constant(const std::string& id);

// Membership structures: one binary relation read as membership.
CheckReport is_transitive_submodel(const Structure& m, const Structure& n,
                                   const std::string& rel = "E");

bool is_isomorphism(const Structure& a, const Structure& b, const std::vector<int>& h);
// Brute force over bijections; refuses universes above 8 elements.
std::optional<std::vector<int>> find_isomorphism(const Structure& a, const Structure& b);

}  // namespace umt
