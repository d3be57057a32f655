#include <thread>

#include "doctest.h"
#include "oracles/oracles.hpp"
#include "umt/entity.hpp"
#include "umt/error.hpp"

using namespace umt;

TEST_CASE("atoms and sets are interned") {
  Entity a = Entity::atom("a");
  CHECK(a == Entity::atom("a"));
  CHECK(a.is_atom());
  CHECK_FALSE(a.is_empty_set());
  CHECK(Entity::empty_set().is_set());
  CHECK(Entity::empty_set().is_empty_set());
  CHECK(Entity::empty_set() != a);
  CHECK(Entity::set({a, a}) == Entity::set({a}));
}

TEST_CASE("literals are extensional") {
  CHECK(parse_entity("{a,b}") == parse_entity("{b,a,a}"));
  CHECK(parse_entity("{ {a} , b }") == parse_entity("{b,{a}}"));
  CHECK(parse_entity("{a,b}").str() == "{a,b}");
  CHECK(parse_entity("{}").size() == 0);
  CHECK(parse_entity("<a|b>").is_atom());
  CHECK(parse_entity("<a|b>").name() == "<a|b>");
}

TEST_CASE("bad literals are rejected") {
  CHECK_THROWS_AS(parse_entity("{a,"), ParseError);
  CHECK_THROWS_AS(parse_entity("{a}}"), ParseError);
  CHECK_THROWS_AS(parse_entity(""), ParseError);
  CHECK_THROWS_AS(parse_entity("a b"), ParseError);
}

TEST_CASE("kuratowski pairs and tuples") {
  Entity a = Entity::atom("a"), b = Entity::atom("b"), c = Entity::atom("c");
  CHECK(kuratowski(a, b) == parse_entity("{{a},{a,b}}"));
  CHECK(kuratowski(a, a) == parse_entity("{{a}}"));
  CHECK(tuple({a, b, c}) == kuratowski(kuratowski(a, b), c));
  CHECK(parse_entity("(a,b,c)") == tuple({a, b, c}));
  CHECK(parse_entity("(a)") == a);
  auto d = decode_pair(kuratowski(a, b));
  REQUIRE(d);
  CHECK(d->first == a);
  CHECK(d->second == b);
  auto dd = decode_pair(kuratowski(a, a));
  REQUIRE(dd);
  CHECK(dd->first == a);
  CHECK(dd->second == a);
  CHECK_FALSE(decode_pair(parse_entity("{a,b}")));
  auto t = decode_tuple(tuple({a, b, c}), 3);
  REQUIRE(t);
  CHECK(*t == EntityList{a, b, c});
}

TEST_CASE("rank") {
  CHECK(Entity::atom("a").rank() == 0);
  CHECK(Entity::empty_set().rank() == 1);
  CHECK(parse_entity("{a}").rank() == 1);
  CHECK(parse_entity("(a,b)").rank() == 2);
}

TEST_CASE("random entities round-trip through their literals") {
  oracle::Rng rng(11);
  EntityList atoms{Entity::atom("a"), Entity::atom("b"), Entity::atom("c")};
  for (int i = 0; i < 300; ++i) {
    Entity e = oracle::random_entity(rng, atoms, 4);
    CHECK(parse_entity(e.str()) == e);
    CHECK(e.rank() == oracle::rank_of(e));
  }
}

TEST_CASE("concurrent interning yields one node per entity") {
  std::vector<Entity> results(4);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&, t] {
      Entity e;
      for (int i = 0; i < 200; ++i) e = Entity::set({Entity::atom("p" + std::to_string(i % 7)), e.valid() ? e : Entity::empty_set()});
      results[t] = e;
    });
  for (auto& th : threads) th.join();
  for (int t = 1; t < 4; ++t) CHECK(results[t] == results[0]);
}
