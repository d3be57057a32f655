#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "umt/entity.hpp"
#include "umt/fol.hpp"
#include "umt/logic.hpp"
#include "umt/report.hpp"

namespace umt {

// A finite structure (A, E) with a distinguished node X. Edges (b, a) read
// as "b E a".
class EpsilonModel {
 public:
  EpsilonModel(std::vector<std::string> carrier, const std::vector<std::pair<std::string, std::string>>& edges,
               const std::string& base);

  int size() const { return static_cast<int>(carrier_.size()); }
  const std::vector<std::string>& carrier() const { return carrier_; }
  const std::string& id(int i) const { return carrier_.at(i); }
  int index_of(const std::string& id) const;
  int base() const { return base_; }
  bool edge(int b, int a) const { return adj_[static_cast<std::size_t>(b) * carrier_.size() + a] != 0; }
  // E-predecessors in carrier order.
  const std::vector<int>& preds(int a) const { return preds_.at(a); }
  std::vector<std::pair<std::string, std::string>> edges() const;

  // Submodel on the given nodes, in carrier order.
  EpsilonModel restrict(const std::vector<int>& nodes) const;
  Structure as_structure(const std::string& rel = "E") const;

  bool operator==(const EpsilonModel& o) const;

 private:
  std::vector<std::string> carrier_;
  std::map<std::string, int> index_;
  std::vector<char> adj_;
  std::vector<std::vector<int>> preds_;
  int base_ = 0;
};

struct BaseVerdict {
  bool holds = true;
  std::optional<std::pair<std::string, std::string>> witness;  // c E b E X
};
BaseVerdict check_base(const EpsilonModel& m);

// Least n with nu_n[a, X] per node, or -1. Computed as the fixpoint
// L0 = {a : a E X}, L(n+1) = Ln together with the nodes whose predecessors
// all lie in Ln; n never needs to exceed the carrier size.
std::vector<int> nu_levels(const EpsilonModel& m);
EpsilonModel truncate(const EpsilonModel& m);

// Evaluates a formula of the membership language on the model: membership
// is E, bounded quantifiers range over E-predecessors and unbounded ones
// over the carrier. Variables are bound to node ids.
bool eval_model(const EpsilonModel& m, const Formula& f, const std::map<std::string, std::string>& env);

struct ExtensionalityVerdict {
  bool holds = true;
  std::optional<std::pair<std::string, std::string>> witness;
};
// Distinct nodes outside {a : a E X} have distinct predecessor sets.
ExtensionalityVerdict is_extensional_over(const EpsilonModel& m);

struct CollapseResult {
  std::vector<Entity> h;  // by carrier index
  Entity image;
  std::vector<int> levels;
};
// Atom name given to a node E-below X.
std::string collapse_atom_name(const std::string& id);
CollapseResult collapse(const EpsilonModel& m);
CheckReport verify_collapse(const EpsilonModel& m, const CollapseResult& r, int depth = 2);

// E-graph of the transitive closure of e. The distinguished node is the set
// of atoms occurring in e, reused when it already lies in the closure; node
// ids are entity literals, the added node is "X".
EpsilonModel epsilon_graph(Entity e);
// Renames atoms as the collapse does.
Entity rename_atoms_for_collapse(Entity e);

}  // namespace umt
