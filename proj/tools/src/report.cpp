#include "lshape_cli/report.hpp"

#include <algorithm>

namespace lshape::cli {

void Tally::check(double lhs, double rhs, double slack) {
  ++checked_;
  has_margin_ = true;
  worst_ = std::max(worst_, lhs - rhs);
  if (!(lhs <= rhs + slack)) ++violations_;
}

void Tally::check(bool ok) {
  ++checked_;
  if (!ok) ++violations_;
}

Assertion Tally::finish() const {
  Assertion a{name_, anchor_, checked_ > 0 && violations_ == 0, Json::object()};
  a.values["checked"] = count_string(checked_);
  a.values["violations"] = count_string(violations_);
  if (has_margin_) a.values["worst_margin"] = worst_;
  return a;
}

void Report::add(const std::vector<Assertion>& as) {
  for (const auto& a : as) assertions_.push_back(a);
}

bool Report::passed() const {
  return std::all_of(assertions_.begin(), assertions_.end(), [](const Assertion& a) { return a.passed; });
}

Json Report::to_json() const {
  Json j = Json::object();
  j["command"] = command_;
  j["config"] = config_;
  j["results"] = results_;
  Json as = Json::array();
  for (const auto& a : assertions_) {
    as.push_back({{"name", a.name}, {"anchor", a.anchor}, {"passed", a.passed}, {"values", a.values}});
  }
  j["assertions"] = as;
  j["passed"] = passed();
  if (wall_clock_ >= 0.0) j["wall_clock_seconds"] = wall_clock_;
  return j;
}

std::string Report::dump() const { return to_json().dump(2) + "\n"; }

}  // namespace lshape::cli
