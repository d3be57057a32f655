#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace umt {

struct EntityNode;

// Handle to an interned hereditarily finite entity: an atom (urelement) or a
// finite set of entities. Nodes live in a global append-only pool, so equal
// entities share one node and equality is pointer comparison.
class Entity {
 public:
  Entity() = default;

  static Entity atom(std::string_view name);
  static Entity set(std::vector<Entity> members);
  static Entity empty_set();

  bool valid() const { return node_ != nullptr; }
  bool is_atom() const;
  bool is_set() const { return valid() && !is_atom(); }
  bool is_empty_set() const;

  // Atom name; throws for sets.
  const std::string& name() const;
  // Members in canonical order; empty for atoms.
  const std::vector<Entity>& members() const;
  std::size_t size() const { return members().size(); }
  bool contains(Entity m) const;

  // Atoms have rank 0, a set has rank 1 + max rank of its members.
  int rank() const;

  // Canonical literal: atoms by name, sets as {m1,m2,...}.
  const std::string& str() const;
  std::size_t hash() const;

  friend bool operator==(Entity a, Entity b) { return a.node_ == b.node_; }
  friend bool operator!=(Entity a, Entity b) { return a.node_ != b.node_; }
  friend bool operator<(Entity a, Entity b);

  const EntityNode* node() const { return node_; }

 private:
  explicit Entity(const EntityNode* n) : node_(n) {}
  const EntityNode* node_ = nullptr;
  friend class EntityPool;
};

struct EntityNode {
  bool atom = false;
  int rank = 0;
  std::size_t hash = 0;
  std::string text;  // atom name or canonical literal
  std::vector<Entity> members;
};

struct EntityHash {
  std::size_t operator()(Entity e) const { return e.hash(); }
};

using EntityList = std::vector<Entity>;

// True if the name can be used as an atom literal.
bool valid_atom_name(std::string_view name);

// Number of nodes in the intern pool.
std::size_t entity_pool_size();

// Entity literal grammar: atom | {e,...} | (a,b,...). Tuples of length >= 3
// nest to the left; a 1-tuple is the entity itself.
Entity parse_entity(std::string_view text);

Entity kuratowski(Entity a, Entity b);
Entity tuple(const EntityList& parts);
std::optional<std::pair<Entity, Entity>> decode_pair(Entity e);
// Inverse of tuple() for a fixed length.
std::optional<EntityList> decode_tuple(Entity e, std::size_t n);

// Sorted, duplicate-free copy.
EntityList canonical_list(EntityList v);

}  // namespace umt

template <>
struct std::hash<umt::Entity> {
  std::size_t operator()(umt::Entity e) const { return e.hash(); }
};
