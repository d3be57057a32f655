#include "umt/report.hpp"

#include <sstream>

namespace umt {

void CheckReport::merge(const CheckReport& other, const std::string& prefix) {
  for (const auto& c : other.counterexamples_) {
    Counterexample copy = c;
    if (!prefix.empty()) copy.formula = prefix + ": " + copy.formula;
    add(std::move(copy));
  }
  failures_ += other.failures_ - static_cast<long long>(other.counterexamples_.size());
  for (const auto& n : other.notes_) notes_.push_back(prefix.empty() ? n : prefix + ": " + n);
  for (const auto& [k, v] : other.stats_) stats_[prefix.empty() ? k : prefix + "." + k] += v;
}

nlohmann::json to_json(const Counterexample& c) {
  nlohmann::json j;
  j["formula"] = c.formula;
  nlohmann::json a = nlohmann::json::object();
  for (const auto& [k, v] : c.assignment) a[k] = v;
  j["assignment"] = a;
  if (!c.detail.empty()) j["detail"] = c.detail;
  if (c.depth >= 0) j["depth"] = c.depth;
  return j;
}

nlohmann::json CheckReport::to_json() const {
  nlohmann::json j;
  j["check"] = name_;
  j["passed"] = passed();
  j["failures"] = failures_;
  j["counterexamples"] = nlohmann::json::array();
  for (const auto& c : counterexamples_) j["counterexamples"].push_back(umt::to_json(c));
  j["stats"] = stats_;
  j["notes"] = notes_;
  if (seed_) j["seed"] = *seed_;
  return j;
}

std::string CheckReport::summary() const {
  std::ostringstream os;
  os << (name_.empty() ? "check" : name_) << ": " << (passed() ? "pass" : "FAIL");
  for (const auto& [k, v] : stats_) os << " " << k << "=" << v;
  if (!passed()) {
    const auto& c = counterexamples_.front();
    os << " first counterexample: " << c.formula;
    if (!c.assignment.empty()) {
      os << " [";
      for (std::size_t i = 0; i < c.assignment.size(); ++i)
        os << (i ? ", " : "") << c.assignment[i].first << "=" << c.assignment[i].second;
      os << "]";
    }
    if (!c.detail.empty()) os << " (" << c.detail << ")";
  }
  return os.str();
}

}  // namespace umt
