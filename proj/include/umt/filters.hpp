#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace umt {

using Mask = std::uint64_t;

// A finite index set with a fixed total order (the listed order). Subsets
// are bitmasks, so at most 64 indices are supported.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::vector<std::string> ids);

  int size() const { return static_cast<int>(ids_.size()); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(int i) const { return ids_.at(i); }
  int index_of(const std::string& id) const;
  Mask full() const { return size() == 64 ? ~Mask(0) : ((Mask(1) << size()) - 1); }
  Mask mask_of(const std::vector<std::string>& ids) const;
  std::vector<std::string> ids_of(Mask m) const;
  std::string show(Mask m) const;
  bool operator==(const IndexSet& o) const { return ids_ == o.ids_; }

 private:
  std::vector<std::string> ids_;
};

struct SetFamily {
  IndexSet index;
  std::vector<Mask> members;  // sorted, duplicate-free

  SetFamily() = default;
  SetFamily(IndexSet idx, std::vector<Mask> m);
  bool contains(Mask m) const;
  Mask intersection() const;  // of all members; the full set if empty
};

// Over a finite index set every filter is generated by its kernel, the
// intersection of all its members.
class Filter {
 public:
  Filter(IndexSet index, Mask kernel);
  // Validates the filter axioms on an explicit family.
  static Filter from_family(const SetFamily& fam);

  const IndexSet& index() const { return index_; }
  Mask kernel() const { return kernel_; }
  bool contains(Mask m) const { return (m & kernel_) == kernel_; }
  bool is_ultra() const;
  // All supersets of the kernel; refuses more than 2^20 members.
  SetFamily members() const;

 private:
  IndexSet index_;
  Mask kernel_;
};

class Ultrafilter {
 public:
  Ultrafilter(IndexSet index, int point);
  static Ultrafilter from_filter(const Filter& f);

  const IndexSet& index() const { return index_; }
  int point() const { return point_; }
  Mask kernel() const { return Mask(1) << point_; }
  bool contains(Mask m) const { return (m >> point_) & 1u; }
  Filter as_filter() const { return Filter(index_, kernel()); }

 private:
  IndexSet index_;
  int point_;
};

bool has_fip(const SetFamily& fam);
Filter generate_filter(const SetFamily& fam);
// Principal at the least element of the family's intersection; an empty
// family yields the least index.
Ultrafilter extend_to_ultrafilter(const SetFamily& fam);
bool is_filter(const SetFamily& fam);
bool is_ultrafilter(const SetFamily& fam);

struct IncompletenessVerdict {
  bool countably_incomplete = false;
  std::string reason;
};
IncompletenessVerdict is_countably_incomplete(const Filter& f);

// Every ultrafilter extending the family contains exactly one part of a
// finite partition. Lists the parts some extension can contain; when only
// one part is possible it is forced.
struct PartitionVerdict {
  std::vector<int> possible;
  std::optional<int> forced;
  std::string reason;
};
PartitionVerdict refute_partition(const SetFamily& fam, const std::vector<Mask>& parts);

}  // namespace umt
