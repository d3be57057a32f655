#include "umt/entity.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "umt/error.hpp"

namespace umt {

class EntityPool {
 public:
  static EntityPool& instance() {
    static EntityPool pool;
    return pool;
  }

  Entity intern(std::unique_ptr<EntityNode> fresh) {
    {
      std::shared_lock lock(mu_);
      auto it = index_.find(fresh->text);
      if (it != index_.end()) return Entity(it->second);
    }
    std::unique_lock lock(mu_);
    auto it = index_.find(fresh->text);
    if (it != index_.end()) return Entity(it->second);
    const EntityNode* raw = fresh.get();
    nodes_.push_back(std::move(fresh));
    index_.emplace(std::string_view(raw->text), raw);
    return Entity(raw);
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return nodes_.size();
  }

 private:
  mutable std::shared_mutex mu_;
  std::vector<std::unique_ptr<EntityNode>> nodes_;
  std::unordered_map<std::string_view, const EntityNode*> index_;
};

bool valid_atom_name(std::string_view name) {
  if (name.empty()) return false;
  if (name.front() == '<') {
    if (name.back() != '>' || name.size() < 3) return false;
    for (char c : name.substr(1, name.size() - 2))
      if (c == '<' || c == '>' || c == '{' || c == '}' || c == '(' ||
          c == ')' || c == ',' || c == ' ')
        return false;
    return true;
  }
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '\'';
    if (!ok) return false;
  }
  return true;
}

Entity Entity::atom(std::string_view name) {
  if (!valid_atom_name(name))
    throw Error("invalid atom name '" + std::string(name) + "'");
  auto node = std::make_unique<EntityNode>();
  node->atom = true;
  node->rank = 0;
  node->text = std::string(name);
  node->hash = std::hash<std::string>{}(node->text);
  return EntityPool::instance().intern(std::move(node));
}

EntityList canonical_list(EntityList v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

Entity Entity::set(std::vector<Entity> members) {
  for (Entity m : members)
    if (!m.valid()) throw Error("null entity in set");
  members = canonical_list(std::move(members));
  auto node = std::make_unique<EntityNode>();
  node->atom = false;
  int r = 0;
  std::size_t len = 2;
  for (Entity m : members) {
    r = std::max(r, m.rank());
    len += m.str().size() + 1;
  }
  node->rank = r + 1;
  node->text.reserve(len);
  node->text.push_back('{');
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) node->text.push_back(',');
    node->text += members[i].str();
  }
  node->text.push_back('}');
  node->hash = std::hash<std::string>{}(node->text);
  node->members = std::move(members);
  return EntityPool::instance().intern(std::move(node));
}

Entity Entity::empty_set() {
  static const Entity e = Entity::set({});
  return e;
}

bool Entity::is_atom() const { return node_ && node_->atom; }
bool Entity::is_empty_set() const {
  return node_ && !node_->atom && node_->members.empty();
}

const std::string& Entity::name() const {
  if (!is_atom()) throw Error("entity is not an atom: " + str());
  return node_->text;
}

const std::vector<Entity>& Entity::members() const {
  static const std::vector<Entity> none;
  return node_ ? node_->members : none;
}

bool Entity::contains(Entity m) const {
  if (!node_ || node_->atom || !m.valid()) return false;
  return std::binary_search(node_->members.begin(), node_->members.end(), m);
}

int Entity::rank() const { return node_ ? node_->rank : 0; }

const std::string& Entity::str() const {
  static const std::string null_text = "<null>";
  return node_ ? node_->text : null_text;
}

std::size_t Entity::hash() const { return node_ ? node_->hash : 0; }

bool operator<(Entity a, Entity b) {
  if (a.node_ == b.node_) return false;
  if (!a.node_ || !b.node_) return !a.node_;
  if (a.node_->rank != b.node_->rank) return a.node_->rank < b.node_->rank;
  if (a.node_->members.size() != b.node_->members.size())
    return a.node_->members.size() < b.node_->members.size();
  return a.node_->text < b.node_->text;
}

std::size_t entity_pool_size() { return EntityPool::instance().size(); }

Entity kuratowski(Entity a, Entity b) {
  return Entity::set({Entity::set({a}), Entity::set({a, b})});
}

Entity tuple(const EntityList& parts) {
  if (parts.empty()) throw Error("empty tuple");
  Entity acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = kuratowski(acc, parts[i]);
  return acc;
}

std::optional<std::pair<Entity, Entity>> decode_pair(Entity e) {
  if (!e.is_set()) return std::nullopt;
  const auto& m = e.members();
  if (m.size() == 1) {
    Entity s = m[0];
    if (s.is_set() && s.size() == 1) return std::make_pair(s.members()[0], s.members()[0]);
    return std::nullopt;
  }
  if (m.size() != 2) return std::nullopt;
  Entity single = m[0], pair = m[1];
  if (!single.is_set() || !pair.is_set()) return std::nullopt;
  if (single.size() != 1) std::swap(single, pair);
  if (single.size() != 1 || pair.size() != 2) return std::nullopt;
  Entity a = single.members()[0];
  if (!pair.contains(a)) return std::nullopt;
  Entity b = pair.members()[0] == a ? pair.members()[1] : pair.members()[0];
  return std::make_pair(a, b);
}

std::optional<EntityList> decode_tuple(Entity e, std::size_t n) {
  if (n == 0) return std::nullopt;
  EntityList out(n);
  for (std::size_t k = n; k > 1; --k) {
    auto p = decode_pair(e);
    if (!p) return std::nullopt;
    out[k - 1] = p->second;
    e = p->first;
  }
  out[0] = e;
  return out;
}

namespace {

class LiteralParser {
 public:
  explicit LiteralParser(std::string_view s) : s_(s) {}

  Entity parse_all() {
    Entity e = parse();
    skip();
    if (pos_ != s_.size()) fail("trailing input");
    return e;
  }

  Entity parse() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of entity literal");
    char c = s_[pos_];
    if (c == '{') {
      ++pos_;
      EntityList items;
      skip();
      if (peek() == '}') {
        ++pos_;
        return Entity::set({});
      }
      while (true) {
        items.push_back(parse());
        skip();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        if (peek() == '}') {
          ++pos_;
          break;
        }
        fail("expected ',' or '}'");
      }
      return Entity::set(std::move(items));
    }
    if (c == '(') {
      ++pos_;
      EntityList items;
      while (true) {
        items.push_back(parse());
        skip();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        if (peek() == ')') {
          ++pos_;
          break;
        }
        fail("expected ',' or ')'");
      }
      return tuple(items);
    }
    if (c == '<') {
      std::size_t end = s_.find('>', pos_);
      if (end == std::string_view::npos) fail("unterminated atom name");
      std::string_view name = s_.substr(pos_, end - pos_ + 1);
      if (!valid_atom_name(name)) fail("invalid atom name");
      pos_ = end + 1;
      return Entity::atom(name);
    }
    std::size_t start = pos_;
    while (pos_ < s_.size()) {
      char d = s_[pos_];
      bool ok = (d >= 'a' && d <= 'z') || (d >= 'A' && d <= 'Z') ||
                (d >= '0' && d <= '9') || d == '_' || d == '.' || d == '\'';
      if (!ok) break;
      ++pos_;
    }
    if (start == pos_) fail(std::string("unexpected character '") + c + "'");
    return Entity::atom(s_.substr(start, pos_ - start));
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n'))
      ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("entity literal: " + msg, 1, static_cast<int>(pos_) + 1);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Entity parse_entity(std::string_view text) { return LiteralParser(text).parse_all(); }

}  // namespace umt
