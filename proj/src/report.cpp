#include "hypercount/report.hpp"

namespace hypercount {

bool SuiteReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.descriptive && !c.pass) return false;
  return true;
}

CheckReport& SuiteReport::add(CheckReport c) {
  checks.push_back(std::move(c));
  return checks.back();
}

Json to_json(const CheckReport& c) {
  Json j;
  j["name"] = c.name;
  j["inputs"] = c.inputs;
  j["observed"] = c.observed;
  j["bound"] = c.bound;
  j["pass"] = c.pass;
  if (c.descriptive) j["descriptive"] = true;
  return j;
}

Json to_json(const SuiteReport& s) {
  Json j;
  j["suite"] = s.suite;
  j["pass"] = s.all_pass();
  j["checks"] = Json::array();
  for (const auto& c : s.checks) j["checks"].push_back(to_json(c));
  return j;
}

std::string dec(const BigCount& v) { return v.str(); }

}  // namespace hypercount
