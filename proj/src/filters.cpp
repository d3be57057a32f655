#include "umt/filters.hpp"

#include <algorithm>
#include <bit>

#include "umt/error.hpp"

namespace umt {

IndexSet::IndexSet(std::vector<std::string> ids) : ids_(std::move(ids)) {
  if (ids_.empty()) throw Error("index set must be nonempty");
  if (ids_.size() > 64) throw CapExceeded("index sets are limited to 64 elements");
  for (std::size_t i = 0; i < ids_.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (ids_[i] == ids_[j]) throw Error("duplicate index '" + ids_[i] + "'");
}

int IndexSet::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i)
    if (ids_[i] == id) return static_cast<int>(i);
  throw Error("unknown index '" + id + "'");
}

Mask IndexSet::mask_of(const std::vector<std::string>& ids) const {
  Mask m = 0;
  for (const auto& s : ids) m |= Mask(1) << index_of(s);
  return m;
}

std::vector<std::string> IndexSet::ids_of(Mask m) const {
  std::vector<std::string> out;
  for (int i = 0; i < size(); ++i)
    if ((m >> i) & 1u) out.push_back(ids_[i]);
  return out;
}

std::string IndexSet::show(Mask m) const {
  std::string s = "{";
  bool first = true;
  for (const auto& id : ids_of(m)) {
    if (!first) s += ",";
    s += id;
    first = false;
  }
  return s + "}";
}

SetFamily::SetFamily(IndexSet idx, std::vector<Mask> m) : index(std::move(idx)), members(std::move(m)) {
  for (Mask x : members)
    if (x & ~index.full()) throw Error("family member outside the index set");
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
}

bool SetFamily::contains(Mask m) const {
  return std::binary_search(members.begin(), members.end(), m);
}

Mask SetFamily::intersection() const {
  Mask acc = index.full();
  for (Mask m : members) acc &= m;
  return acc;
}

Filter::Filter(IndexSet index, Mask kernel) : index_(std::move(index)), kernel_(kernel) {
  if (kernel_ == 0) throw PreconditionError("a filter cannot contain the empty set");
  if (kernel_ & ~index_.full()) throw Error("kernel outside the index set");
}

bool Filter::is_ultra() const { return std::popcount(kernel_) == 1; }

SetFamily Filter::members() const {
  Mask free = index_.full() & ~kernel_;
  int k = std::popcount(free);
  if (k > 20) throw CapExceeded("filter has more than 2^20 members");
  std::vector<Mask> out;
  // Enumerate the subsets of the complement of the kernel.
  Mask sub = 0;
  do {
    out.push_back(kernel_ | sub);
    sub = (sub - free) & free;
  } while (sub != 0);
  return SetFamily(index_, std::move(out));
}

bool is_filter(const SetFamily& fam) {
  if (!fam.contains(fam.index.full())) return false;
  Mask kernel = fam.intersection();
  if (kernel == 0) return false;
  for (Mask m : fam.members)
    if (m == 0) return false;
  // A finite filter is exactly the set of supersets of its kernel.
  Mask free = fam.index.full() & ~kernel;
  if (std::popcount(free) > 20) throw CapExceeded("family too large to validate");
  std::size_t expected = std::size_t(1) << std::popcount(free);
  if (fam.members.size() != expected) return false;
  for (Mask m : fam.members)
    if ((m & kernel) != kernel) return false;
  return true;
}

Filter Filter::from_family(const SetFamily& fam) {
  if (!is_filter(fam)) throw PreconditionError("family is not a filter");
  return Filter(fam.index, fam.intersection());
}

bool is_ultrafilter(const SetFamily& fam) {
  if (!is_filter(fam)) return false;
  if (fam.index.size() > 20) throw CapExceeded("index set too large to validate");
  for (Mask a = 0; a <= fam.index.full(); ++a) {
    bool in = fam.contains(a);
    bool comp = fam.contains(fam.index.full() & ~a);
    if (in == comp) return false;
  }
  return true;
}

Ultrafilter::Ultrafilter(IndexSet index, int point) : index_(std::move(index)), point_(point) {
  if (point_ < 0 || point_ >= index_.size()) throw Error("principal point outside the index set");
}

Ultrafilter Ultrafilter::from_filter(const Filter& f) {
  if (!f.is_ultra())
    throw PreconditionError("filter is not an ultrafilter", "kernel " + f.index().show(f.kernel()));
  return Ultrafilter(f.index(), std::countr_zero(f.kernel()));
}

bool has_fip(const SetFamily& fam) { return fam.intersection() != 0; }

Filter generate_filter(const SetFamily& fam) {
  if (!has_fip(fam))
    throw PreconditionError("family lacks the finite intersection property");
  return Filter(fam.index, fam.intersection());
}

Ultrafilter extend_to_ultrafilter(const SetFamily& fam) {
  Mask k = fam.intersection();
  if (k == 0) throw PreconditionError("family lacks the finite intersection property");
  return Ultrafilter(fam.index, std::countr_zero(k));
}

IncompletenessVerdict is_countably_incomplete(const Filter& f) {
  IncompletenessVerdict v;
  v.countably_incomplete = false;
  v.reason = "index set is finite: the kernel " + f.index().show(f.kernel()) +
             " belongs to the filter, so every descending chain of members has its "
             "intersection in the filter";
  return v;
}

PartitionVerdict refute_partition(const SetFamily& fam, const std::vector<Mask>& parts) {
  Mask cover = 0;
  for (Mask p : parts) {
    if (p & cover) throw PreconditionError("parts are not disjoint");
    cover |= p;
  }
  if (cover != fam.index.full()) throw PreconditionError("parts do not cover the index set");
  Mask k = fam.intersection();
  if (k == 0) throw PreconditionError("family lacks the finite intersection property");
  PartitionVerdict v;
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (parts[i] & k) v.possible.push_back(static_cast<int>(i));
  if (v.possible.size() == 1) {
    v.forced = v.possible.front();
    v.reason = "only part " + std::to_string(*v.forced) + " meets the intersection " +
               fam.index.show(k);
  } else {
    v.reason = std::to_string(v.possible.size()) +
               " parts meet the intersection; each is chosen by some extension";
  }
  return v;
}

}  // namespace umt
