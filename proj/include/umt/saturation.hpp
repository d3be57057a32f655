#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "umt/entity.hpp"
#include "umt/filters.hpp"
#include "umt/report.hpp"
#include "umt/star_map.hpp"

namespace umt {

struct ConcurrencyVerdict {
  bool concurrent = true;
  std::optional<Entity> blocking;  // finite subset of dom(R) with no common successor
  std::optional<Entity> bound;     // common successor of all of dom(R), when concurrent
};
// Every nonempty finite subset of dom(R) has a common R-successor.
ConcurrencyVerdict check_concurrent(Entity r);
// {(a, F) : a in F, F a finite subset of A}.
Entity finite_subset_relation(Entity a);

struct Hyperfinite {
  int n = 0;
  Entity f;          // {(k, a_k)} with k ranging over the number atoms below n
  Entity certificate;  // B in V(X) with A in *P(B)
  bool psi = false;    // the hyperfiniteness formula holds of (A, f, n)
};
// Numbers are the atoms "0", "1", ... of the context base. Every internal
// set is hyperfinite at finite scale, so this throws rather than returning
// nullopt when A is external or the prefix is too short.
std::optional<Hyperfinite> is_hyperfinite(const StarMapContext& ctx, Entity a);
// Bijection k -> k-th member of A over the numerals 0..prefix-1, with every
// parameter passed through `image`, and the hyperfiniteness formula
// evaluated on it. Needs |A| < prefix.
Hyperfinite hyperfinite_witness(Entity a, int prefix, const std::function<Entity(Entity)>& image);
// Atoms "0".."m" present in the base, as the largest contiguous prefix.
int number_prefix(const StarMapContext& ctx);

// Per family: f.i.p. and a nonempty intersection of the images.
CheckReport enlargement_check(const StarMapContext& ctx, const std::vector<Entity>& families);

struct EnlargementResult {
  std::vector<std::string> index;  // P(V_k(X)), by entity literal
  std::optional<Ultrafilter> ultrafilter;
  Entity a;        // g/U
  Entity sigma_b;
  Entity star_b;
  bool fip = false;
  bool principal_at_top = false;
  CheckReport report{"enlargement"};
};
// Builds I = P(V_k(X)), the cones I_a = {b : a subset of b}, an ultrafilter
// extending them, and g(a) = a intersected with B. With drop_member, g loses
// one element at the principal point.
EnlargementResult enlargement_pipeline(const EntityList& base, int k, Entity target,
                                       bool drop_member = false);

// Pointwise maps f_i : A -> B assembled into F/U. f takes members of A to
// members of *B.
Entity extend_function(const StarMapContext& ctx, Entity a, Entity b,
                       const std::map<Entity, Entity>& f);

// p : P(X) -> P(I), with X of at most 16 elements. Subsets of X and I are
// bitmasks in the listed orders.
struct OrderReversal {
  std::vector<std::string> ground;
  IndexSet index;
  std::vector<Mask> p;  // indexed by subset mask of the ground set

  OrderReversal(std::vector<std::string> ground_set, IndexSet idx, std::vector<Mask> values);
  static OrderReversal constant(std::vector<std::string> ground_set, IndexSet idx, Mask value);
  Mask at(Mask s) const { return p.at(s); }
  Mask full_ground() const { return (Mask(1) << ground.size()) - 1; }
  std::string show_subset(Mask s) const;
};

struct LawVerdict {
  bool holds = true;
  std::optional<std::pair<Mask, Mask>> witness;
};
LawVerdict is_order_reversal(const OrderReversal& p);
LawVerdict is_anti_additive(const OrderReversal& p);

struct LocalFiniteness {
  bool holds = true;  // automatic for a finite ground set
  std::vector<int> bound;  // per index: largest |s| with i in p(s), -1 if none
};
LocalFiniteness is_locally_finite(const OrderReversal& p);

// Phi_i for i in p(empty set); other indices lie in no p(s) and carry no
// finite set.
struct Support {
  IndexSet index;
  std::vector<std::optional<Mask>> phi;
};
Support support_of(const OrderReversal& p);
OrderReversal reversal_from_support(const Support& s, const std::vector<std::string>& ground);

struct Localized {
  OrderReversal lp;
  std::vector<int> level;  // N(i) = least n with i not in I_n, else chain length
  CheckReport report{"localize"};
};
Localized localize(const OrderReversal& p, const std::vector<Mask>& chain);

// q(s) = p({0..max s}) and q(empty) = p(empty), over the ground set 0..m.
OrderReversal monotone_antiadditive(const OrderReversal& p);

// Formulas replaced by subsets: sets[i][t] is the subset of a domain of
// size domain[i] (at most 64) picked out by the t-th ground element at
// index i. p(s) = {i : the sets of s meet at index i}.
struct SetSystem {
  std::vector<std::string> ground;
  IndexSet index;
  std::vector<int> domain;
  std::vector<std::vector<Mask>> sets;
};
OrderReversal reversal_of(const SetSystem& sys);

struct Realization {
  bool supported = false;
  std::vector<int> choice;  // a_i per index, -1 where none was needed
  CheckReport report{"realize"};
};
// Checks (i) i in p(Phi_i) and (ii) {i : t in Phi_i} in U for every t, then
// picks a_i in the intersection of Phi_i and verifies the class of (a_i)
// satisfies every ground element.
Realization realize_support(const SetSystem& sys, const Support& phi, const Ultrafilter& u);

}  // namespace umt
