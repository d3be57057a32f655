#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "umt/filters.hpp"
#include "umt/fol.hpp"
#include "umt/mostowski.hpp"
#include "umt/saturation.hpp"
#include "umt/star_map.hpp"

namespace umt {

using nlohmann::json;

json load_json_file(const std::string& path);

Language language_from_json(const json& j);
json language_to_json(const Language& l);

// {"language": ..., "universe": [...], "relations": {"R": [[..]]},
//  "functions": {"f": [[args..., value]]}}
Structure structure_from_json(const json& j);
json structure_to_json(const Structure& s);

// {"index_set": [...], "members": [[...], ...]}
SetFamily family_from_json(const json& j);
json family_to_json(const SetFamily& f);

// {"principal": id} or {"members": [[...], ...]} over the given index set.
Ultrafilter ultrafilter_from_json(const json& j, const IndexSet& index);
json ultrafilter_to_json(const Ultrafilter& u);
Filter filter_from_json(const json& j, const IndexSet& index);

// {"base": [...], "rank_bound": n, "index_set": [...],
//  "ultrafilter": {"principal": id}, "canonicalize": bool}
StarMapContext context_from_json(const json& j);

// Subset keys in sorted bracket notation, e.g. "[0,1]".
OrderReversal reversal_from_json(const json& j);
json reversal_to_json(const OrderReversal& p);
std::string subset_key(const std::vector<std::string>& ground, Mask s);

// {"carrier": [...], "E": [[b, a], ...], "base": id}
EpsilonModel model_from_json(const json& j);
json model_to_json(const EpsilonModel& m);

std::vector<std::string> string_list(const json& j, const char* what);

}  // namespace umt
