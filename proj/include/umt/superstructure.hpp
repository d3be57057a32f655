#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "umt/entity.hpp"
#include "umt/fol.hpp"
#include "umt/logic.hpp"
#include "umt/report.hpp"

namespace umt {

// Set operations on entities. Operations that expect sets throw on atoms.
namespace sets {
Entity unite(Entity a, Entity b);
Entity intersect(Entity a, Entity b);
Entity minus(Entity a, Entity b);
Entity product(Entity a, Entity b);
Entity power(Entity a);  // refuses more than 2^20 subsets
Entity big_union(Entity a);
Entity big_intersection(Entity a);  // of a nonempty family of sets
bool subset(Entity a, Entity b);
Entity domain(Entity r);
Entity range(Entity r);
Entity inverse(Entity r);
Entity compose(Entity r, Entity s);  // {(x,z) : x r y and y s z}
Entity image(Entity r, Entity c);
Entity preimage(Entity r, Entity c);
bool is_relation(Entity r);
bool is_function(Entity f);
bool is_function_between(Entity f, Entity a, Entity b);
std::optional<Entity> apply(Entity f, Entity x);
bool is_injective(Entity f);
bool is_surjective(Entity f, Entity b);
Entity function_space(Entity a, Entity b);  // B^A, refuses more than 2^20 maps
// Choice functions of an indexed family given as a function i -> A_i.
Entity indexed_product(Entity family);
Entity of_atoms(const std::vector<std::string>& names);
}  // namespace sets

// V_n(X) cap: UMT_CAP from the environment, else 10^6 entities.
std::size_t default_cap();
// |V_n(X)| by the recurrence v0 = |X|, v(n+1) = |X| + 2^v(n); nullopt on
// overflow.
std::optional<std::size_t> vn_size(std::size_t base, int n);
// Sorted elements of V_n(X); throws CapExceeded when the predicted size
// exceeds the cap.
EntityList enumerate_vn(const EntityList& base, int n, std::size_t cap = 0);
Entity vn_entity(const EntityList& base, int n, std::size_t cap = 0);

// Atoms occurring in the transitive closure of e.
EntityList atoms_of(Entity e);
// Least n with e in V_n(X); throws PreconditionError on an atom outside X.
int rank_over(Entity e, const EntityList& base);
// e in V_k(X) without materializing the level.
bool in_level(Entity e, const EntityList& base, int k);

using Env = std::map<std::string, Entity>;
// Evaluates a bounded membership formula directly on entities. Quantifiers
// bounded by an atom are vacuous.
bool eval_bounded(const Formula& f, const Env& env = {});

bool is_transitive(Entity e);
// Every set member A satisfies A ⊆ T and P(A) ⊆ T.
bool is_supertransitive(Entity t);
Entity build_supertransitive(Entity s);
// The transitive closure of the given entities, including them.
EntityList transitive_closure(const EntityList& roots);

// Thirteen closure properties of V(X), checked over V_n(X).
CheckReport check_closure_properties(const EntityList& base, int n, std::uint64_t seed = 0);

// (A, R1, ..., Rk) as a tuple entity, relations in name order; element ids
// are mapped to entities. Relation entries of arity m are m-tuples.
Entity encode_structure(const Structure& s, const std::map<std::string, Entity>& element_map);

struct BarFormula {
  Formula formula;
  std::string structure_var;
  std::string transitive_var;
};
// Translation of a relational formula to a bounded membership formula with
// two extra parameters: the encoded structure and a transitive set
// containing it.
BarFormula bar_formula(const Formula& phi, const Language& lang);

}  // namespace umt
