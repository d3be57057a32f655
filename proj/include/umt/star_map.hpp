#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "umt/entity.hpp"
#include "umt/enumeration.hpp"
#include "umt/filters.hpp"
#include "umt/logic.hpp"
#include "umt/report.hpp"
#include "umt/superstructure.hpp"

namespace umt {

// Values of a function I -> V(X), by index position.
using PointwiseFunction = std::vector<Entity>;

// Ultrapower of V(X) over a finite index set. Every ultrafilter on a finite
// set is principal, so a class is determined by the value at the principal
// point. With canonicalize set, atom classes are identified with that value
// (Y = X); otherwise an atom class is a fresh atom <v0|v1|...> named after
// its representative, which takes the least base atom off the point.
class StarMapContext {
 public:
  StarMapContext(EntityList base, int rank_bound, Ultrafilter u, bool canonicalize = true,
                 std::size_t cap = 0);

  const EntityList& base() const { return base_; }
  int rank_bound() const { return rank_bound_; }
  const Ultrafilter& ultrafilter() const { return u_; }
  const IndexSet& index() const { return u_.index(); }
  bool canonicalize() const { return canonicalize_; }

  // f/U; with guard set, the value at the principal point must be within
  // the rank bound.
  Entity quotient(const PointwiseFunction& f, bool guard = true) const;
  // c_a/U, with corruption overrides applied first.
  Entity star(Entity a) const;
  // As star, without the rank guard; for objects derived from tracked ones.
  Entity star_unbounded(Entity a) const;
  Entity sigma_image(Entity a) const;
  // Image base set *X.
  Entity star_base() const;

  // Tracked entities: V_k(X) for the largest materializable k <= rank_bound,
  // plus the level sets V_j(X) for j < rank_bound.
  const EntityList& tracked() const { return tracked_; }
  int materialized_level() const { return level_; }
  // V_j(X) for j <= materialized_level().
  const EntityList& level(int j) const { return levels_.at(j); }

  // Replaces star(a) by b. Used by mutation fixtures.
  void override_star(Entity a, Entity b) { overrides_[a] = b; }
  void clear_overrides() { overrides_.clear(); }
  bool corrupted() const { return !overrides_.empty(); }

 private:
  Entity lift(Entity e) const;

  EntityList base_;
  int rank_bound_;
  Ultrafilter u_;
  bool canonicalize_;
  Entity least_atom_;
  EntityList tracked_;
  std::vector<EntityList> levels_;
  int level_ = 0;
  std::map<Entity, Entity> overrides_;
  struct Cache {
    std::mutex mutex;
    std::unordered_map<Entity, Entity> map;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

struct TransferOptions {
  int depth = 2;
  int max_params = 2;
  std::uint64_t seed = 0;
  std::uint64_t and_budget = UINT64_MAX;
  std::size_t exhaustive_limit = 100000;
};

// Bounded transfer over parameters from V_{rank_bound-1}(X): every
// enumerated bounded formula holds of the parameters exactly when its
// star-transform holds of their images.
CheckReport check_transfer(const StarMapContext& ctx, const TransferOptions& opt);

enum class Kind { Standard, Internal, External };
std::string kind_name(Kind k);

struct Classification {
  Kind kind = Kind::External;
  std::optional<Entity> witness;  // u with v = *u, or A with v in *A
  std::string detail;
};
Classification classify(const StarMapContext& ctx, Entity v);

struct ComprehensionResult {
  Entity star_of_set;  // *{y in a : phi(y, u)}
  Entity set_of_star;  // {y in *a : *phi(y, *u)}
  bool equal = false;
};
// phi has the free variable `var` plus the parameters.
ComprehensionResult star_comprehension(const StarMapContext& ctx, const Formula& phi,
                                       const std::string& var, Entity a, const Env& params);

struct InternalDefinition {
  Entity result;
  Classification classification;
  std::string witness;  // the level T with result in *P(T)
};
InternalDefinition internal_definition(const StarMapContext& ctx, const Formula& phi,
                                       const std::string& var, Entity b, const Env& params);

CheckReport star_algebra_suite(const StarMapContext& ctx, std::uint64_t seed = 0);

// Mutation fixtures for transfer: "swap-singletons", "drop-member",
// "empty-to-singleton", "swap-atoms", "rank-bump".
std::vector<std::string> corruption_names();
void apply_corruption(StarMapContext& ctx, const std::string& name);

}  // namespace umt
