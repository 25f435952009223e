#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

namespace lshape::cli {

using Json = nlohmann::json;

struct Assertion {
  std::string name;
  /// Short descriptive tag of the statement being checked.
  std::string anchor;
  bool passed = true;
  Json values = Json::object();
};

/// Counts checks of lhs <= rhs + slack and keeps the worst margin.
class Tally {
 public:
  Tally(std::string name, std::string anchor) : name_(std::move(name)), anchor_(std::move(anchor)) {}

  void check(double lhs, double rhs, double slack);
  void check(bool ok);
  std::uint64_t violations() const { return violations_; }
  Assertion finish() const;

 private:
  std::string name_;
  std::string anchor_;
  std::uint64_t checked_ = 0;
  std::uint64_t violations_ = 0;
  double worst_ = -std::numeric_limits<double>::infinity();
  bool has_margin_ = false;
};

/// Deterministic JSON report: keys are sorted, counts are strings, and the
/// wall clock only appears when requested.
class Report {
 public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  Json& config() { return config_; }
  Json& results() { return results_; }
  void add(Assertion a) { assertions_.push_back(std::move(a)); }
  void add(const std::vector<Assertion>& as);
  void set_wall_clock(double seconds) { wall_clock_ = seconds; }

  bool passed() const;
  Json to_json() const;
  std::string dump() const;

 private:
  std::string command_;
  Json config_ = Json::object();
  Json results_ = Json::object();
  std::vector<Assertion> assertions_;
  double wall_clock_ = -1.0;
};

inline std::string count_string(std::uint64_t v) { return std::to_string(v); }

}  // namespace lshape::cli
