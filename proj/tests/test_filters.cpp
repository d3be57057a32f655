#include <bit>

#include "doctest.h"
#include "umt/error.hpp"
#include "umt/filters.hpp"

using namespace umt;

namespace {

IndexSet indices(int n) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  return IndexSet(ids);
}

// A family of subsets of an n-element set as a bitset over the 2^n subsets.
SetFamily family_of(const IndexSet& idx, std::uint32_t bits) {
  std::vector<Mask> m;
  for (Mask s = 0; s < (Mask(1) << idx.size()); ++s)
    if ((bits >> s) & 1u) m.push_back(s);
  return SetFamily(idx, m);
}

// Filter axioms checked literally on the member list.
bool brute_filter(int n, std::uint32_t bits) {
  Mask full = (Mask(1) << n) - 1;
  if (!((bits >> full) & 1u)) return false;
  if (bits & 1u) return false;
  for (Mask a = 0; a <= full; ++a) {
    if (!((bits >> a) & 1u)) continue;
    for (Mask b = 0; b <= full; ++b) {
      if ((b & a) == a && !((bits >> b) & 1u)) return false;
      if (((bits >> b) & 1u) && !((bits >> (a & b)) & 1u)) return false;
    }
  }
  return true;
}

bool brute_fip(int n, std::uint32_t bits) {
  // Every subfamily, by intersecting all members: finite intersections of a
  // finite family reduce to the whole family.
  Mask acc = (Mask(1) << n) - 1;
  for (Mask s = 0; s < (Mask(1) << n); ++s)
    if ((bits >> s) & 1u) acc &= s;
  return acc != 0;
}

std::vector<Mask> members(const SetFamily& f) { return f.members; }

}  // namespace

TEST_CASE("finite intersection property examples") {
  IndexSet i3 = indices(3);
  CHECK(has_fip(SetFamily(i3, {0b011, 0b110})));
  CHECK_FALSE(has_fip(SetFamily(i3, {0b011, 0})));
  CHECK_FALSE(has_fip(SetFamily(i3, {0b001, 0b010})));
  CHECK(has_fip(SetFamily(i3, {})));
  CHECK_THROWS_AS(SetFamily(i3, {0b1000}), Error);
}

TEST_CASE("generated filters") {
  IndexSet i3 = indices(3);
  Filter f = generate_filter(SetFamily(i3, {0b011, 0b110}));
  CHECK(members(f.members()) == std::vector<Mask>{0b010, 0b011, 0b110, 0b111});
  CHECK(members(generate_filter(SetFamily(i3, {0b111})).members()) == std::vector<Mask>{0b111});
  IndexSet i2 = indices(2);
  CHECK(members(generate_filter(SetFamily(i2, {0b01})).members()) == std::vector<Mask>{0b01, 0b11});
  CHECK_THROWS_AS(generate_filter(SetFamily(i3, {0b001, 0b010})), PreconditionError);
  CHECK_THROWS_AS(Filter(i3, 0), PreconditionError);
}

TEST_CASE("ultrafilter extension") {
  IndexSet i3 = indices(3);
  CHECK(extend_to_ultrafilter(SetFamily(i3, {0b011, 0b110})).point() == 1);
  CHECK(extend_to_ultrafilter(SetFamily(indices(2), {})).point() == 0);
  CHECK(extend_to_ultrafilter(SetFamily(i3, {0b100})).point() == 2);
  CHECK_THROWS_AS(extend_to_ultrafilter(SetFamily(i3, {0b001, 0b010})), PreconditionError);
}

TEST_CASE("ultrafilter recognition and incompleteness") {
  IndexSet i2 = indices(2);
  Ultrafilter u(i2, 0);
  CHECK(is_ultrafilter(u.as_filter().members()));
  CHECK_FALSE(is_ultrafilter(SetFamily(i2, {0b11})));
  CHECK(is_filter(SetFamily(i2, {0b11})));
  CHECK_FALSE(Filter(i2, 0b11).is_ultra());
  CHECK_THROWS_AS(Ultrafilter::from_filter(Filter(i2, 0b11)), PreconditionError);
  CHECK(Ultrafilter::from_filter(Filter(i2, 0b10)).point() == 1);
  for (Mask k = 1; k <= 0b111; ++k) {
    auto v = is_countably_incomplete(Filter(indices(3), k));
    CHECK_FALSE(v.countably_incomplete);
    CHECK_FALSE(v.reason.empty());
  }
}

TEST_CASE("partition refuter") {
  IndexSet i4 = indices(4);
  auto v = refute_partition(SetFamily(i4, {0b0110}), {0b0011, 0b1100});
  CHECK(v.possible == std::vector<int>{0, 1});
  CHECK_FALSE(v.forced);
  auto w = refute_partition(SetFamily(i4, {0b0011}), {0b0011, 0b1100});
  REQUIRE(w.forced);
  CHECK(*w.forced == 0);
  CHECK_THROWS_AS(refute_partition(SetFamily(i4, {}), {0b0011, 0b0110}), PreconditionError);
  CHECK_THROWS_AS(refute_partition(SetFamily(i4, {}), {0b0011}), PreconditionError);
}

TEST_CASE("filter recognition matches the axioms exhaustively") {
  for (int n = 1; n <= 4; ++n) {
    IndexSet idx = indices(n);
    std::uint64_t families = std::uint64_t(1) << (1u << n);
    int filters = 0;
    for (std::uint64_t bits = 0; bits < families; ++bits) {
      bool want = brute_filter(n, static_cast<std::uint32_t>(bits));
      SetFamily fam = family_of(idx, static_cast<std::uint32_t>(bits));
      if (is_filter(fam) != want) {
        CHECK_MESSAGE(false, "family bits " << bits << " over " << n);
      }
      filters += want;
      if (!want) continue;
      CHECK(members(Filter::from_family(fam).members()) == fam.members);
    }
    // One filter per nonempty kernel.
    CHECK(filters == (1 << n) - 1);
  }
}

TEST_CASE("one of a set and its complement keeps the f.i.p.") {
  for (int n = 1; n <= 4; ++n) {
    IndexSet idx = indices(n);
    Mask full = idx.full();
    std::uint64_t families = std::uint64_t(1) << (1u << n);
    for (std::uint64_t bits = 0; bits < families; ++bits) {
      auto b32 = static_cast<std::uint32_t>(bits);
      if (!brute_fip(n, b32)) continue;
      SetFamily fam = family_of(idx, b32);
      REQUIRE(has_fip(fam));
      for (Mask b = 0; b <= full; ++b) {
        auto with = [&](Mask extra) {
          auto m = fam.members;
          m.push_back(extra);
          return has_fip(SetFamily(idx, m));
        };
        if (!(with(b) || with(full & ~b))) {
          CHECK_MESSAGE(false, "family bits " << bits << " set " << b);
        }
      }
    }
  }
}

TEST_CASE("ultrafilters are exactly the maximal filters") {
  for (int n = 1; n <= 4; ++n) {
    IndexSet idx = indices(n);
    std::uint64_t families = std::uint64_t(1) << (1u << n);
    std::vector<std::uint32_t> filters;
    for (std::uint64_t bits = 0; bits < families; ++bits)
      if (brute_filter(n, static_cast<std::uint32_t>(bits))) filters.push_back(static_cast<std::uint32_t>(bits));
    for (std::uint32_t f : filters) {
      bool maximal = true;
      for (std::uint32_t g : filters)
        if (g != f && (g & f) == f) maximal = false;
      CHECK(is_ultrafilter(family_of(idx, f)) == maximal);
    }
    int ultra = 0;
    for (std::uint32_t f : filters) ultra += is_ultrafilter(family_of(idx, f));
    CHECK(ultra == n);
  }
}

TEST_CASE("an ultrafilter containing a union contains a part") {
  for (int n = 1; n <= 4; ++n) {
    IndexSet idx = indices(n);
    Mask full = idx.full();
    for (int p = 0; p < n; ++p) {
      Ultrafilter u(idx, p);
      SetFamily fam = u.as_filter().members();
      REQUIRE(is_ultrafilter(fam));
      for (int parts = 1; parts <= 3; ++parts) {
        std::vector<Mask> a(parts, 0);
        while (true) {
          Mask uni = 0;
          bool some = false;
          for (Mask x : a) {
            uni |= x;
            some = some || fam.contains(x);
          }
          if (fam.contains(uni)) CHECK(some);
          CHECK(fam.contains(uni) == u.contains(uni));
          int k = 0;
          while (k < parts && a[k] == full) a[k++] = 0;
          if (k == parts) break;
          ++a[k];
        }
      }
    }
  }
}

TEST_CASE("index sets") {
  IndexSet idx({"a", "b", "c"});
  CHECK(idx.mask_of({"a", "c"}) == 0b101);
  CHECK(idx.show(0b101) == "{a,c}");
  CHECK(idx.ids_of(0b010) == std::vector<std::string>{"b"});
  CHECK_THROWS_AS(IndexSet({"a", "a"}), Error);
  CHECK_THROWS_AS(IndexSet(std::vector<std::string>{}), Error);
  CHECK_THROWS_AS(idx.index_of("z"), Error);
  CHECK(std::popcount(idx.full()) == 3);
}
