#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "umt/logic.hpp"

namespace umt {

// One enumerated formula. Children refer to earlier nodes, so a table can
// be evaluated bottom-up in index order.
struct EnumNode {
  enum Op : std::uint8_t { Atom, Not, And, Forall, BForall };
  Op op = Atom;
  std::uint8_t var = 0;    // quantified variable
  std::uint8_t bound = 0;  // bounding variable for BForall
  std::uint8_t depth = 0;
  std::uint32_t free = 0;  // bitmask of free variables
  std::int32_t a = -1;     // atom index or first child
  std::int32_t b = -1;
};

struct EnumOptions {
  int max_depth = 2;
  std::vector<std::string> vars{"x", "y"};
  // And-nodes at the top level beyond this count are sampled with the seed.
  std::uint64_t and_budget = UINT64_MAX;
  std::uint64_t seed = 0;
};

// Duplicate-free enumeration of formulas by depth: atoms, then Not, And and
// quantifier nodes built from lower levels. And is taken over unordered pairs
// of distinct formulas.
class FormulaTable {
 public:
  std::vector<std::string> vars;
  std::vector<Formula> atoms;
  std::vector<EnumNode> nodes;
  std::vector<std::size_t> level_end;
  bool sampled = false;
  std::uint64_t top_and_total = 0;
  std::uint64_t top_and_kept = 0;

  std::size_t size() const { return nodes.size(); }
  int max_depth() const { return static_cast<int>(level_end.size()) - 1; }
  Formula formula(std::size_t i) const;
  int free_count(std::size_t i) const;
};

// First-order formulas over the language: atoms are relation instances and
// equalities between terms built from variables, constants and one function
// application.
FormulaTable enumerate_table(const Language& lang, const EnumOptions& opt);
// Bounded formulas over the membership language: x = y, x in y, and
// quantifiers "forall v in w" with v != w.
FormulaTable enumerate_bounded_table(const EnumOptions& opt);

// Assignments of k variables over a domain of n elements, encoded in mixed
// radix with variable 0 least significant.
struct AssignmentSpace {
  int n = 0;
  int k = 0;
  std::size_t count = 1;
  std::vector<std::size_t> stride;

  AssignmentSpace(int n_, int k_);
  int value(std::size_t s, int var) const { return static_cast<int>((s / stride[var]) % n); }
  std::size_t with(std::size_t s, int var, int val) const {
    return s + (static_cast<std::size_t>(val) - value(s, var)) * stride[var];
  }
  std::size_t encode(const std::vector<int>& vals) const;
};

// Truth table of every formula of a table over a finite domain.
class MaskTable {
 public:
  MaskTable(std::size_t formulas, std::size_t assignments)
      : words_((assignments + 63) / 64), bits_(formulas * words_, 0) {}
  bool get(std::size_t f, std::size_t s) const {
    return (bits_[f * words_ + (s >> 6)] >> (s & 63)) & 1u;
  }
  void set(std::size_t f, std::size_t s) { bits_[f * words_ + (s >> 6)] |= (1ull << (s & 63)); }
  std::uint64_t* row(std::size_t f) { return &bits_[f * words_]; }
  const std::uint64_t* row(std::size_t f) const { return &bits_[f * words_]; }
  std::size_t words() const { return words_; }

 private:
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

// Atom truth callback: fills in the satisfying assignments for atom i.
using AtomFiller = std::function<void(std::size_t atom, const AssignmentSpace&, MaskTable&,
                                      std::size_t row)>;

// Evaluates all nodes. members[e] lists the domain elements that are members
// of element e; it is only consulted for BForall nodes.
MaskTable evaluate_table(const FormulaTable& table, int domain_size, const AtomFiller& atoms,
                         const std::vector<std::vector<int>>* members = nullptr);

}  // namespace umt
