#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace umt {

struct Counterexample {
  std::string formula;  // offending formula, law or item, printed
  std::vector<std::pair<std::string, std::string>> assignment;
  std::string detail;
  int depth = -1;
};

// Outcome of a property check. Fails exactly when it holds a counterexample.
class CheckReport {
 public:
  explicit CheckReport(std::string name = {}) : name_(std::move(name)) {}

  bool passed() const { return counterexamples_.empty(); }
  const std::string& name() const { return name_; }

  void add(Counterexample c) {
    ++failures_;
    if (counterexamples_.size() < limit_) counterexamples_.push_back(std::move(c));
  }
  void fail(std::string what, std::string detail = {}) {
    add(Counterexample{std::move(what), {}, std::move(detail), -1});
  }
  void note(std::string s) { notes_.push_back(std::move(s)); }
  void count(const std::string& key, long long by = 1) { stats_[key] += by; }
  void set_stat(const std::string& key, long long v) { stats_[key] = v; }
  void set_seed(std::uint64_t s) { seed_ = s; }
  void merge(const CheckReport& other, const std::string& prefix = {});

  const std::vector<Counterexample>& counterexamples() const { return counterexamples_; }
  const std::vector<std::string>& notes() const { return notes_; }
  const std::map<std::string, long long>& stats() const { return stats_; }
  long long failures() const { return failures_; }
  std::optional<std::uint64_t> seed() const { return seed_; }

  nlohmann::json to_json() const;
  std::string summary() const;

 private:
  std::string name_;
  std::vector<Counterexample> counterexamples_;
  std::vector<std::string> notes_;
  std::map<std::string, long long> stats_;
  std::optional<std::uint64_t> seed_;
  long long failures_ = 0;
  std::size_t limit_ = 20;
};

nlohmann::json to_json(const Counterexample& c);

}  // namespace umt
